//! Corpus-level preprocessing: annotations in, eye-slot PNGs plus a slot
//! manifest and a rejection report out.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dataset::{parse_annotations, AnnotationRecord, Label, RowDiagnostic, SplitManifest};
use crate::error::{Error, Result};
use crate::eyeslot::{extract_eye_slot, EyeSlot, SlotOutcome};

pub const SLOT_MANIFEST: &str = "slots.csv";
pub const REJECTION_REPORT: &str = "rejections.txt";
pub const REJECTED_LIST: &str = "rejected.csv";
pub const REASON_UNREADABLE_IMAGE: &str = "unreadable image";

/// One accepted slot. `slot_path` is relative to the manifest's directory;
/// `source_image` is the annotation's image path and serves as the id.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotEntry {
    pub slot_path: String,
    pub source_image: String,
    pub label: Label,
    pub theta: f64,
    pub center_x: f64,
    pub center_y: f64,
    pub box_width: f64,
    pub box_height: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PreprocessSummary {
    pub records: usize,
    pub malformed: Vec<RowDiagnostic>,
    pub accepted: Vec<SlotEntry>,
    /// `(source_image, reason)` in annotation order.
    pub rejected: Vec<(String, String)>,
}

impl PreprocessSummary {
    pub fn rejection_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for (_, reason) in &self.rejected {
            *counts.entry(reason.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// `key: value` lines, one per count, reasons sorted by name.
    pub fn report_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "records: {}", self.records).unwrap();
        writeln!(out, "malformed rows: {}", self.malformed.len()).unwrap();
        writeln!(out, "accepted: {}", self.accepted.len()).unwrap();
        writeln!(out, "rejected: {}", self.rejected.len()).unwrap();
        for (reason, n) in self.rejection_counts() {
            writeln!(out, "rejected {reason}: {n}").unwrap();
        }
        out
    }
}

enum Processed {
    Accepted(SlotEntry),
    Rejected(String),
}

fn process_one(record: &AnnotationRecord, index: usize, image_root: &Path, out_dir: &Path) -> Result<Processed> {
    if !record.label.in_range() {
        return Ok(Processed::Rejected(crate::dataset::REASON_LABEL_OUT_OF_RANGE.into()));
    }
    let src = image_root.join(&record.image_path);
    let image = match image::open(&src) {
        Ok(img) => img.into_rgb8(),
        Err(e) => {
            log::warn!("{}: {e}", src.display());
            return Ok(Processed::Rejected(REASON_UNREADABLE_IMAGE.into()));
        }
    };
    match extract_eye_slot(&image, &record.landmarks, record.label) {
        SlotOutcome::Rejected { reason, .. } => Ok(Processed::Rejected(reason.into())),
        SlotOutcome::Accepted(slot, geometry) => {
            let slot_path = format!("slots/slot_{index:06}.png");
            let dest = out_dir.join(&slot_path);
            slot.image.save(&dest).map_err(|e| Error::Image { path: dest, source: e })?;
            Ok(Processed::Accepted(SlotEntry {
                slot_path,
                source_image: record.id(),
                label: record.label,
                theta: geometry.bbox.theta,
                center_x: geometry.bbox.center.x,
                center_y: geometry.bbox.center.y,
                box_width: geometry.bbox.width,
                box_height: geometry.bbox.height,
            }))
        }
    }
}

/// Extracts a slot for every annotation record, writing `slots/*.png`,
/// the slot manifest, the rejected list and the rejection report into
/// `out_dir`. Image paths are resolved against `image_root`.
pub fn preprocess(annotations: &Path, image_root: &Path, out_dir: &Path) -> Result<PreprocessSummary> {
    let parsed = parse_annotations(annotations)?;
    for d in &parsed.diagnostics {
        log::warn!("{}: {d}", annotations.display());
    }
    if parsed.records.is_empty() {
        return Err(Error::InvalidArgument(format!("no records in {}", annotations.display())));
    }
    let slots_dir = out_dir.join("slots");
    std::fs::create_dir_all(&slots_dir).map_err(|e| Error::io(&slots_dir, e))?;

    let results: Vec<Processed> = parsed
        .records
        .par_iter()
        .enumerate()
        .map(|(i, r)| process_one(r, i, image_root, out_dir))
        .collect::<Result<_>>()?;

    let mut summary = PreprocessSummary {
        records: parsed.records.len(),
        malformed: parsed.diagnostics,
        ..Default::default()
    };
    for (record, result) in parsed.records.iter().zip(results) {
        match result {
            Processed::Accepted(entry) => summary.accepted.push(entry),
            Processed::Rejected(reason) => summary.rejected.push((record.id(), reason)),
        }
    }

    write_file(&out_dir.join(SLOT_MANIFEST), |w| write_slot_manifest(w, &summary.accepted))?;
    write_file(&out_dir.join(REJECTED_LIST), |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["source_image", "reason"]).map_err(csv_err)?;
        for (src, reason) in &summary.rejected {
            csv.write_record([src, reason]).map_err(csv_err)?;
        }
        csv.flush().map_err(|e| Error::Parse(e.to_string()))
    })?;
    let report = out_dir.join(REJECTION_REPORT);
    std::fs::write(&report, summary.report_text()).map_err(|e| Error::io(&report, e))?;
    Ok(summary)
}

fn write_file(path: &Path, f: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> Result<()>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

const MANIFEST_HEADER: [&str; 9] = [
    "slot_path",
    "source_image",
    "valence",
    "arousal",
    "theta",
    "center_x",
    "center_y",
    "box_width",
    "box_height",
];

pub fn write_slot_manifest<W: Write>(writer: W, entries: &[SlotEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(MANIFEST_HEADER).map_err(csv_err)?;
    for e in entries {
        w.write_record([
            e.slot_path.clone(),
            e.source_image.clone(),
            e.label.valence.to_string(),
            e.label.arousal.to_string(),
            e.theta.to_string(),
            e.center_x.to_string(),
            e.center_y.to_string(),
            e.box_width.to_string(),
            e.box_height.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_slot_manifest<R: Read>(reader: R) -> Result<Vec<SlotEntry>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(csv_err)?;
        if row.len() != MANIFEST_HEADER.len() {
            return Err(Error::Parse(format!(
                "slot manifest row {}: expected {} fields, found {}",
                i + 1,
                MANIFEST_HEADER.len(),
                row.len()
            )));
        }
        let num = |k: usize| -> Result<f64> {
            row[k]
                .parse()
                .map_err(|_| Error::Parse(format!("slot manifest row {}: bad {} {:?}", i + 1, MANIFEST_HEADER[k], &row[k])))
        };
        out.push(SlotEntry {
            slot_path: row[0].to_string(),
            source_image: row[1].to_string(),
            label: Label {
                valence: num(2)?,
                arousal: num(3)?,
            },
            theta: num(4)?,
            center_x: num(5)?,
            center_y: num(6)?,
            box_width: num(7)?,
            box_height: num(8)?,
        });
    }
    Ok(out)
}

/// Slot entries of one or more manifests, indexed by source image.
#[derive(Debug, Clone, Default)]
pub struct SlotIndex {
    entries: HashMap<String, (PathBuf, SlotEntry)>,
    order: Vec<String>,
}

impl SlotIndex {
    pub fn open(manifests: &[PathBuf]) -> Result<Self> {
        let mut index = SlotIndex::default();
        for path in manifests {
            let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            for entry in read_slot_manifest(std::io::BufReader::new(file))? {
                let id = entry.source_image.clone();
                if index.entries.insert(id.clone(), (base.clone(), entry)).is_some() {
                    return Err(Error::InvalidArgument(format!("duplicate slot id {id:?}")));
                }
                index.order.push(id);
            }
        }
        Ok(index)
    }

    /// Ids in manifest order.
    pub fn ids(&self) -> &[String] {
        &self.order
    }

    pub fn entry(&self, id: &str) -> Option<&SlotEntry> {
        self.entries.get(id).map(|(_, e)| e)
    }

    /// Loads the slots for `ids`, in the given order.
    pub fn load(&self, ids: &[String]) -> Result<Vec<EyeSlot>> {
        ids.par_iter()
            .map(|id| {
                let (base, entry) = self
                    .entries
                    .get(id)
                    .ok_or_else(|| Error::InvalidArgument(format!("no slot for id {id:?}")))?;
                let path = base.join(&entry.slot_path);
                let image = image::open(&path)
                    .map_err(|e| Error::Image { path, source: e })?
                    .into_rgb8();
                Ok(EyeSlot {
                    image,
                    label: entry.label,
                })
            })
            .collect()
    }
}

/// Builds the split manifest from the accepted ids of the training corpus
/// (the pool) and of the held-out corpus (the test set).
pub fn split_from_index(pool: &SlotIndex, test: Option<&SlotIndex>, fraction: f64, seed: u64) -> Result<SplitManifest> {
    let test_ids = test.map(|t| t.ids().to_vec()).unwrap_or_default();
    SplitManifest::build(pool.ids(), test_ids, fraction, seed)
}
