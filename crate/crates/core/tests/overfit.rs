use std::time::Instant;

use ocular_core::augment::{AugmentConfig, InputSize};
use ocular_core::models::{ModelConfig, ModelId, Network};
use ocular_core::synthetic::{synthetic_slots, CorpusSpec};
use ocular_core::training::{evaluate_loss, train, PreparedSet, TrainConfig};

#[test]
fn desk_m1_memorizes_eight_slots() {
    let data = synthetic_slots(&CorpusSpec {
        count: 8,
        width: 120,
        height: 120,
        seed: 11,
        ..CorpusSpec::default()
    });
    assert_eq!(data.len(), 8);
    let config = TrainConfig {
        batch_size: 8,
        epochs: 500,
        seed: 11,
        augment: AugmentConfig::identity(),
        ..TrainConfig::default()
    };
    let started = Instant::now();
    let mut net = Network::build(&ModelConfig::desk(ModelId::M1), 11).unwrap();
    let history = train(&mut net, &data, &[], &config, None).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let first_below = history.records.iter().find(|r| r.train_loss < 1e-3).map(|r| r.epoch);
    let infer = evaluate_loss(&mut net, &PreparedSet::new(&data, InputSize::DESK).unwrap()).unwrap();
    println!(
        "final train mse {:e}, first epoch below 1e-3 {first_below:?}, inference mse {infer:e}, {elapsed:.1}s",
        history.records.last().unwrap().train_loss
    );
    assert!(history.records.last().unwrap().train_loss < 1e-3);
    assert!(elapsed < 300.0);
}
