use ocular_core::augment::{AugmentConfig, InputSize};
use ocular_core::eyeslot::EyeSlot;
use ocular_core::models::{load_checkpoint, ModelConfig, ModelId, Network};
use ocular_core::nn::{mse_dual_loss, Adam, AdamConfig, Mode, Tensor};
use ocular_core::synthetic::{synthetic_slots, CorpusSpec};
use ocular_core::training::{evaluate_loss, predict, train, PreparedSet, TrainConfig, Trainer};

fn slots(n: usize, seed: u64) -> Vec<EyeSlot> {
    let s = synthetic_slots(&CorpusSpec {
        count: n,
        width: 120,
        height: 120,
        seed,
        ..CorpusSpec::default()
    });
    assert_eq!(s.len(), n);
    s
}

fn config(epochs: usize, batch: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        batch_size: batch,
        seed: 3,
        ..TrainConfig::default()
    }
}

#[test]
fn full_batch_epoch_takes_one_step() {
    let data = slots(6, 1);
    let mut net = Network::build(&ModelConfig::desk(ModelId::M3), 1).unwrap();
    let mut trainer = Trainer::new(&mut net, config(1, 6)).unwrap();
    trainer.fit(&data, &[]).unwrap();
    assert_eq!(trainer.optimizer.step_count(), 1);
    assert_eq!(trainer.history().records[0].steps, 1);
    assert_eq!(trainer.history().records[0].val_loss, None);
}

#[test]
fn partial_batch_is_dropped() {
    let data = slots(7, 2);
    let mut net = Network::build(&ModelConfig::desk(ModelId::M3), 1).unwrap();
    let h = train(&mut net, &data, &[], &config(2, 3), None).unwrap();
    assert_eq!(h.len(), 2);
    assert!(h.records.iter().all(|r| r.steps == 2));
}

#[test]
fn same_seed_same_history_and_weights() {
    let data = slots(8, 3);
    let val = slots(4, 4);
    let run = || {
        let mut net = Network::build(&ModelConfig::desk(ModelId::M2), 5).unwrap();
        let h = train(&mut net, &data, &val, &config(2, 4), None).unwrap();
        let w: Vec<f64> = net.params().iter().flat_map(|p| p.value.data().to_vec()).collect();
        (h.records, w)
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
}

#[test]
fn validation_loss_is_repeatable() {
    let data = slots(4, 5);
    let mut net = Network::build(&ModelConfig::desk(ModelId::M1), 2).unwrap();
    train(&mut net, &data, &[], &config(1, 4), None).unwrap();
    let set = PreparedSet::new(&data, InputSize::DESK).unwrap();
    let a = evaluate_loss(&mut net, &set).unwrap();
    let b = evaluate_loss(&mut net, &set).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn small_adam_step_decreases_batch_loss() {
    let data = slots(4, 6);
    let set = PreparedSet::new(&data, InputSize::DESK).unwrap();
    let x = Tensor::stack(&set.inputs).unwrap();
    let y = Tensor::new(vec![4, 2], set.labels.iter().flat_map(|l| [l.valence, l.arousal]).collect()).unwrap();
    for id in [ModelId::M1, ModelId::M2, ModelId::M3] {
        let mut net = Network::build(&ModelConfig::desk(id), 4).unwrap();
        let mut adam = Adam::new(AdamConfig {
            alpha: 1e-4,
            ..AdamConfig::default()
        });
        let (before, grad) = mse_dual_loss(&net.forward(&x, Mode::Train).unwrap(), &y).unwrap();
        net.backward(&grad).unwrap();
        adam.step(&mut net.params_mut()).unwrap();
        let (after, _) = mse_dual_loss(&net.forward(&x, Mode::Train).unwrap(), &y).unwrap();
        assert!(after < before, "{id}: {before} -> {after}");
    }
}

#[test]
fn predict_properties() {
    let mut net = Network::build(&ModelConfig::desk(ModelId::M1), 8).unwrap();
    let zeros = Tensor::zeros(&[2, 24, 64, 3]);
    for row in predict(&mut net, &zeros).unwrap() {
        assert_eq!(row, [0.0, 0.0]);
    }

    let data = slots(5, 7);
    train(&mut net, &data, &[], &config(1, 5), None).unwrap();
    let set = PreparedSet::new(&data, InputSize::DESK).unwrap();
    let batch = Tensor::stack(&set.inputs).unwrap();
    let once = predict(&mut net, &batch).unwrap();
    assert_eq!(once, predict(&mut net, &batch).unwrap());
    for (i, row) in once.iter().enumerate() {
        let single = predict(&mut net, &batch.slice_batch(i, i + 1)).unwrap()[0];
        assert!((single[0] - row[0]).abs() < 1e-6 && (single[1] - row[1]).abs() < 1e-6);
    }
}

#[test]
fn resume_from_checkpoint_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let data = slots(4, 8);
    let initial = Network::build(&ModelConfig::desk(ModelId::M3), 6).unwrap();
    let cfg = config(2, 4);
    let weights = |n: &Network| n.params().iter().flat_map(|p| p.value.data().to_vec()).collect::<Vec<_>>();

    let mut straight = initial.clone();
    let full = train(&mut straight, &data, &[], &cfg, None).unwrap();

    let mut first = initial.clone();
    let mut trainer = Trainer::new(&mut first, TrainConfig { epochs: 1, ..cfg })
        .unwrap()
        .with_checkpoints(dir.path())
        .unwrap();
    trainer.fit(&data, &[]).unwrap();
    let history = trainer.into_history();
    assert!(dir.path().join("best.ckpt").exists());

    let (mut resumed, adam) = load_checkpoint(&dir.path().join("last.ckpt")).unwrap();
    let mut trainer = Trainer::new(&mut resumed, cfg).unwrap().resume(adam.unwrap(), history);
    trainer.fit(&data, &[]).unwrap();
    assert_eq!(trainer.history().records, full.records);
    assert_eq!(weights(&resumed), weights(&straight));
}

#[test]
fn config_validation() {
    let mut net = Network::build(&ModelConfig::desk(ModelId::M3), 1).unwrap();
    assert!(Trainer::new(&mut net, config(1, 1)).is_err());
    assert!(Trainer::new(&mut net, config(0, 4)).is_err());
    let data = slots(3, 9);
    assert!(train(&mut net, &data, &[], &config(1, 4), None).is_err());
    assert!(train(&mut net, &[], &[], &config(1, 4), None).is_err());
    let aug = AugmentConfig::identity();
    assert!(aug.validate().is_ok());
}
