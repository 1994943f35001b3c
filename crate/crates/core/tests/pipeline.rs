use std::path::Path;

use ocular_core::dataset::{parse_annotations, write_annotations, AnnotationRecord, Label};
use ocular_core::eyeslot::Point;
use ocular_core::pipeline::{preprocess, split_from_index, SlotIndex, REJECTION_REPORT, SLOT_MANIFEST};
use ocular_core::synthetic::{face_landmarks, write_face_corpus, FaceSpec};

fn fixture(dir: &Path) -> Vec<AnnotationRecord> {
    let mut faces: Vec<FaceSpec> = (0..10)
        .map(|i| FaceSpec {
            angle: -20.0 + 4.0 * i as f64,
            ..FaceSpec::upright(
                Point::new(80.0, 80.0),
                45.0,
                Label {
                    valence: -0.9 + 0.2 * i as f64,
                    arousal: 0.5 - 0.1 * i as f64,
                },
            )
        })
        .collect();
    faces[3].squeeze_x = 0.15;
    faces[7].label.arousal = 1.4;
    write_face_corpus(dir, &faces, 160, 160, 9).unwrap()
}

#[test]
fn ten_images_two_ineligible() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let out = dir.path().join("out");
    let summary = preprocess(&dir.path().join("annotations.csv"), dir.path(), &out).unwrap();
    assert_eq!(summary.records, 10);
    assert_eq!(summary.accepted.len(), 8);
    let counts = summary.rejection_counts();
    assert_eq!(counts.len(), 2);
    assert_eq!(counts["portrait aspect"], 1);
    assert_eq!(counts["label out of range"], 1);
    assert_eq!(summary.rejected[0].0, "images/face_0003.png");

    let report = std::fs::read_to_string(out.join(REJECTION_REPORT)).unwrap();
    assert!(report.contains("accepted: 8\n"));
    let index = SlotIndex::open(&[out.join(SLOT_MANIFEST)]).unwrap();
    assert_eq!(index.ids().len(), 8);
    let slots = index.load(index.ids()).unwrap();
    assert!(slots.iter().all(|s| s.image.width() >= s.image.height()));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let ann = dir.path().join("annotations.csv");
    let run = |name: &str| {
        let out = dir.path().join(name);
        preprocess(&ann, dir.path(), &out).unwrap();
        (
            std::fs::read(out.join(SLOT_MANIFEST)).unwrap(),
            std::fs::read(out.join("slots/slot_000000.png")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn empty_annotations_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ann = dir.path().join("empty.csv");
    write_annotations(std::fs::File::create(&ann).unwrap(), &[]).unwrap();
    let err = preprocess(&ann, dir.path(), &dir.path().join("out")).unwrap_err();
    assert!(err.to_string().contains("no records"), "{err}");
}

#[test]
fn missing_image_is_counted() {
    let dir = tempfile::tempdir().unwrap();
    let mut records = fixture(dir.path());
    records.push(AnnotationRecord {
        image_path: "images/missing.png".into(),
        landmarks: face_landmarks(&FaceSpec::upright(Point::new(80.0, 80.0), 45.0, Label { valence: 0.0, arousal: 0.0 })),
        label: Label { valence: 0.0, arousal: 0.0 },
    });
    let ann = dir.path().join("more.csv");
    write_annotations(std::fs::File::create(&ann).unwrap(), &records).unwrap();
    assert_eq!(parse_annotations(&ann).unwrap().records.len(), 11);
    let summary = preprocess(&ann, dir.path(), &dir.path().join("out")).unwrap();
    assert_eq!(summary.rejection_counts()["unreadable image"], 1);
}

#[test]
fn split_over_slot_ids() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let out = dir.path().join("out");
    preprocess(&dir.path().join("annotations.csv"), dir.path(), &out).unwrap();
    let index = SlotIndex::open(&[out.join(SLOT_MANIFEST)]).unwrap();
    let split = split_from_index(&index, None, 0.25, 4).unwrap();
    assert_eq!(split.validation.len(), 2);
    assert_eq!(split.train.len(), 6);
    assert_eq!(split, split_from_index(&index, None, 0.25, 4).unwrap());
}
