//! Annotation ingestion, label filtering and train/validation/test splits.
//!
//! The annotation format is one CSV row per image:
//! `image_path, x0, y0, x1, y1, ..., x67, y67, valence, arousal`
//! (139 fields). An optional header row whose first field is `image_path`
//! is skipped.

mod split;

pub use split::{carve_validation, round_half_up, SplitManifest};

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eyeslot::Landmarks68;

pub const LABEL_MIN: f64 = -1.0;
pub const LABEL_MAX: f64 = 1.0;

/// Number of fields in a well-formed annotation row.
pub const ANNOTATION_COLUMNS: usize = 1 + 136 + 2;

/// A (valence, arousal) pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Label {
    pub valence: f64,
    pub arousal: f64,
}

impl Label {
    pub const fn new(valence: f64, arousal: f64) -> Self {
        Self { valence, arousal }
    }

    pub fn in_range(&self) -> bool {
        let ok = |v: f64| (LABEL_MIN..=LABEL_MAX).contains(&v);
        ok(self.valence) && ok(self.arousal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub image_path: PathBuf,
    pub landmarks: Landmarks68,
    pub label: Label,
}

impl AnnotationRecord {
    /// Record identifier used in split manifests.
    pub fn id(&self) -> String {
        self.image_path.to_string_lossy().into_owned()
    }
}

/// A row that could not be turned into a record.
#[derive(Debug, Clone, PartialEq)]
pub struct RowDiagnostic {
    /// 1-based line number in the file.
    pub row: usize,
    pub message: String,
}

impl fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {}: {}", self.row, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedAnnotations {
    pub records: Vec<AnnotationRecord>,
    pub diagnostics: Vec<RowDiagnostic>,
}

pub fn parse_annotations(path: &Path) -> Result<ParsedAnnotations> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_annotations_from(file)
}

pub fn parse_annotations_from<R: std::io::Read>(reader: R) -> Result<ParsedAnnotations> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);

    let mut out = ParsedAnnotations::default();
    for (i, row) in rdr.records().enumerate() {
        let row_no = match &row {
            Ok(r) => r.position().map(|p| p.line() as usize).unwrap_or(i + 1),
            Err(_) => i + 1,
        };
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                out.diagnostics.push(RowDiagnostic {
                    row: row_no,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if i == 0 && row.get(0) == Some("image_path") {
            continue;
        }
        match parse_row(&row) {
            Ok(rec) => out.records.push(rec),
            Err(message) => out.diagnostics.push(RowDiagnostic {
                row: row_no,
                message,
            }),
        }
    }
    Ok(out)
}

fn parse_row(row: &csv::StringRecord) -> std::result::Result<AnnotationRecord, String> {
    if row.len() != ANNOTATION_COLUMNS {
        return Err(format!(
            "expected {ANNOTATION_COLUMNS} columns, found {}",
            row.len()
        ));
    }
    let path = row.get(0).unwrap_or_default();
    if path.is_empty() {
        return Err("empty image path".into());
    }
    let mut values = Vec::with_capacity(ANNOTATION_COLUMNS - 1);
    for (col, field) in row.iter().enumerate().skip(1) {
        let v: f64 = field
            .parse()
            .map_err(|_| format!("column {}: not a number: {field:?}", col + 1))?;
        if !v.is_finite() {
            return Err(format!("column {}: non-finite value", col + 1));
        }
        values.push(v);
    }
    let landmarks = Landmarks68::from_flat(&values[..136]).map_err(|e| e.to_string())?;
    Ok(AnnotationRecord {
        image_path: PathBuf::from(path),
        landmarks,
        label: Label::new(values[136], values[137]),
    })
}

pub fn write_annotations<W: std::io::Write>(writer: W, records: &[AnnotationRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    let mut header = vec!["image_path".to_string()];
    for i in 0..68 {
        header.push(format!("x{i}"));
        header.push(format!("y{i}"));
    }
    header.push("valence".into());
    header.push("arousal".into());
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut fields = Vec::with_capacity(ANNOTATION_COLUMNS);
        fields.push(r.id());
        fields.extend(r.landmarks.to_flat().iter().map(|v| v.to_string()));
        fields.push(r.label.valence.to_string());
        fields.push(r.label.arousal.to_string());
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub const REASON_LABEL_OUT_OF_RANGE: &str = "label out of range";

#[derive(Debug, Clone, PartialEq)]
pub struct Rejected<T> {
    pub item: T,
    pub reason: &'static str,
}

/// Splits records into those whose labels lie in [-1, 1] and the rest.
pub fn filter_valid_labels(
    records: Vec<AnnotationRecord>,
) -> (Vec<AnnotationRecord>, Vec<Rejected<AnnotationRecord>>) {
    let mut kept = Vec::with_capacity(records.len());
    let mut rejected = Vec::new();
    for r in records {
        if r.label.in_range() {
            kept.push(r);
        } else {
            rejected.push(Rejected {
                item: r,
                reason: REASON_LABEL_OUT_OF_RANGE,
            });
        }
    }
    (kept, rejected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(path: &str, ncoords: usize, v: f64, a: f64) -> String {
        let mut s = path.to_string();
        for i in 0..ncoords {
            s.push_str(&format!(",{}", i as f64 * 0.25));
        }
        s.push_str(&format!(",{v},{a}\n"));
        s
    }

    fn rec(v: f64, a: f64) -> AnnotationRecord {
        AnnotationRecord {
            image_path: format!("img_{v}_{a}.png").into(),
            landmarks: Landmarks68::from_flat(&[0.0; 136]).unwrap(),
            label: Label::new(v, a),
        }
    }

    #[test]
    fn neutral_row_parses() {
        let parsed = parse_annotations_from(row("a.png", 136, 0.0, 0.0).as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert!(parsed.diagnostics.is_empty());
        assert_eq!(parsed.records[0].label, Label::new(0.0, 0.0));
        assert_eq!(parsed.records[0].landmarks.points()[1].x, 0.5);
    }

    #[test]
    fn short_row_reports_column_count() {
        let parsed = parse_annotations_from(row("a.png", 135, 0.0, 0.0).as_bytes()).unwrap();
        assert!(parsed.records.is_empty());
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.diagnostics[0].row, 1);
        assert!(parsed.diagnostics[0].message.contains("138"), "{}", parsed.diagnostics[0]);
    }

    #[test]
    fn mixed_corpus_counts() {
        let text = [
            row("a.png", 136, 0.1, 0.2),
            row("b.png", 136, -0.5, 0.9),
            row("c.png", 134, 0.0, 0.0),
            row("d.png", 136, 1.0, -1.0),
        ]
        .concat();
        let parsed = parse_annotations_from(text.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 3);
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.diagnostics[0].row, 3);
    }

    #[test]
    fn non_numeric_field_names_column() {
        let text = row("a.png", 136, 0.0, 0.0).replace(",0.5,", ",abc,");
        let parsed = parse_annotations_from(text.as_bytes()).unwrap();
        assert_eq!(parsed.diagnostics.len(), 1);
        assert!(parsed.diagnostics[0].message.contains("column 4"));
    }

    #[test]
    fn missing_file_is_error() {
        assert!(matches!(
            parse_annotations(Path::new("/definitely/not/here.csv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn header_is_skipped() {
        let mut buf = Vec::new();
        write_annotations(&mut buf, &[rec(0.5, 0.5)]).unwrap();
        let parsed = parse_annotations_from(&buf[..]).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert!(parsed.diagnostics.is_empty());
    }

    #[test]
    fn filter_rejects_out_of_range() {
        let (kept, rejected) = filter_valid_labels(vec![rec(1.5, 0.0)]);
        assert!(kept.is_empty());
        assert_eq!(rejected[0].reason, REASON_LABEL_OUT_OF_RANGE);
    }

    #[test]
    fn filter_keeps_closed_boundary() {
        let (kept, rejected) = filter_valid_labels(vec![rec(-1.0, 1.0)]);
        assert_eq!(kept.len(), 1);
        assert!(rejected.is_empty());
    }

    #[test]
    fn filter_counts() {
        let mut recs: Vec<_> = (0..8).map(|i| rec(i as f64 / 10.0, 0.0)).collect();
        recs.push(rec(0.0, 2.0));
        recs.push(rec(0.1, 2.0));
        let (kept, rejected) = filter_valid_labels(recs);
        assert_eq!((kept.len(), rejected.len()), (8, 2));
    }
}
