mod common;

use common::ScalarAdam;
use ocular_core::nn::{Adam, AdamConfig, Param, Tensor};

/// f(x) = a (x - b)², gradient 2a (x - b).
const QUADRATICS: [(f64, f64, f64); 4] = [(1.0, 3.0, 0.0), (0.5, -2.0, 4.0), (10.0, 0.25, -1.0), (0.01, 100.0, 7.0)];

#[test]
fn hundred_steps_match_scalar_adam() {
    let config = AdamConfig::default();
    let mut adam = Adam::new(config);
    let mut params: Vec<Param> = QUADRATICS
        .iter()
        .map(|&(_, _, x0)| Param::new(Tensor::new(vec![1], vec![x0]).unwrap()))
        .collect();
    let mut oracles: Vec<(ScalarAdam, f64)> = QUADRATICS
        .iter()
        .map(|&(_, _, x0)| (ScalarAdam::new(config.alpha, config.beta1, config.beta2, config.epsilon), x0))
        .collect();
    for _ in 0..100 {
        for (p, &(a, b, _)) in params.iter_mut().zip(&QUADRATICS) {
            let x = p.value.data()[0];
            p.grad = Tensor::new(vec![1], vec![2.0 * a * (x - b)]).unwrap();
        }
        adam.step(&mut params.iter_mut().collect::<Vec<_>>()).unwrap();
        for ((o, x), &(a, b, _)) in oracles.iter_mut().zip(&QUADRATICS) {
            *x = o.step(*x, 2.0 * a * (*x - b));
        }
        for (p, (_, x)) in params.iter().zip(&oracles) {
            assert!((p.value.data()[0] - x).abs() <= 1e-12);
        }
    }
    assert_eq!(adam.step_count(), 100);
}

#[test]
fn first_step_moves_by_alpha() {
    for g in [1e-3, 0.5, 7.0, -300.0] {
        let mut adam = Adam::new(AdamConfig::default());
        let mut p = Param::new(Tensor::new(vec![1], vec![1.0]).unwrap());
        p.grad = Tensor::new(vec![1], vec![g]).unwrap();
        adam.step(&mut [&mut p]).unwrap();
        let moved = 1.0 - p.value.data()[0];
        assert!((moved.abs() - 1e-3).abs() < 1e-3 * 1e-4, "g = {g}: moved {moved}");
        assert_eq!(moved.signum(), g.signum());
    }
}

#[test]
fn non_finite_gradient_leaves_state_untouched() {
    let mut adam = Adam::new(AdamConfig::default());
    let mut p = Param::new(Tensor::new(vec![2], vec![1.0, 2.0]).unwrap());
    p.grad = Tensor::new(vec![2], vec![0.1, f64::NAN]).unwrap();
    assert!(adam.step(&mut [&mut p]).is_err());
    assert_eq!(p.value.data(), &[1.0, 2.0]);
    assert_eq!(adam.step_count(), 0);
}
