use ocular_core::dataset::{parse_annotations_from, write_annotations, AnnotationRecord, Label};
use ocular_core::eyeslot::{Landmarks68, NUM_LANDMARKS};
use proptest::prelude::*;

fn record() -> impl Strategy<Value = AnnotationRecord> {
    (
        "[a-z0-9_/]{1,20}\\.(png|jpg)",
        prop::collection::vec(-1e4f64..1e4, 2 * NUM_LANDMARKS),
        -2.0f64..2.0,
        -2.0f64..2.0,
    )
        .prop_map(|(path, coords, v, a)| AnnotationRecord {
            image_path: path.into(),
            landmarks: Landmarks68::from_flat(&coords).unwrap(),
            label: Label { valence: v, arousal: a },
        })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(records in prop::collection::vec(record(), 0..8)) {
        let mut buf = Vec::new();
        write_annotations(&mut buf, &records).unwrap();
        let parsed = parse_annotations_from(buf.as_slice()).unwrap();
        prop_assert!(parsed.diagnostics.is_empty());
        prop_assert_eq!(parsed.records, records);
    }
}
