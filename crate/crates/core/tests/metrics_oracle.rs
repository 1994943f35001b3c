mod common;

use common::{oracle_ccc, oracle_pearson, oracle_rmse, oracle_sagr};
use ocular_core::metrics::{ccc, evaluate_report, pearson, render_table, rmse, sagr};
use ocular_core::seed;
use proptest::prelude::*;
use rand::Rng;

fn random_pairs(n: usize, seed_value: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = seed::rng(seed_value);
    let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t: Vec<f64> = p.iter().map(|v| 0.6 * v + rng.gen_range(-0.5..0.5)).collect();
    (p, t)
}

#[test]
fn thousand_pairs_match_loop_oracles() {
    let (p, t) = random_pairs(1000, 1);
    assert!((rmse(&p, &t).unwrap() - oracle_rmse(&p, &t)).abs() < 1e-9);
    assert!((pearson(&p, &t).unwrap() - oracle_pearson(&p, &t)).abs() < 1e-12);
    assert!((ccc(&p, &t).unwrap() - oracle_ccc(&p, &t)).abs() < 1e-9);
    assert!((sagr(&p, &t).unwrap() - oracle_sagr(&p, &t)).abs() < 1e-9);
}

#[test]
fn report_cells_match_oracles() {
    let (pv, tv) = random_pairs(1000, 2);
    let (pa, ta) = random_pairs(1000, 3);
    let preds: Vec<[f64; 2]> = pv.iter().zip(&pa).map(|(v, a)| [*v, *a]).collect();
    let targets: Vec<[f64; 2]> = tv.iter().zip(&ta).map(|(v, a)| [*v, *a]).collect();
    let r = evaluate_report(&preds, &targets).unwrap();
    let want = [
        oracle_rmse(&pv, &tv),
        oracle_rmse(&pa, &ta),
        oracle_pearson(&pv, &tv),
        oracle_pearson(&pa, &ta),
        oracle_ccc(&pv, &tv),
        oracle_ccc(&pa, &ta),
        oracle_sagr(&pv, &tv),
        oracle_sagr(&pa, &ta),
    ];
    for (got, want) in r.cells().iter().zip(want) {
        assert!((got - want).abs() < 1e-9);
    }
    let table = render_table(&[("M1", &r)]);
    assert!(table.lines().nth(3).unwrap().starts_with("M1"));
}

#[test]
fn ccc_of_unit_offset_is_two_thirds() {
    let x = [-1.0, 1.0, -1.0, 1.0];
    let y: Vec<f64> = x.iter().map(|v| v + 1.0).collect();
    assert!((ccc(&x, &y).unwrap() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn attenuation_on_hundred_draws() {
    for s in 0..100 {
        let (p, t) = random_pairs(50, 100 + s);
        assert!(ccc(&p, &t).unwrap().abs() <= pearson(&p, &t).unwrap().abs());
        assert!((ccc(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }
}

fn nonconstant(v: &[f64]) -> bool {
    v.iter().any(|x| (x - v[0]).abs() > 1e-3)
}

proptest! {
    #[test]
    fn invariants(
        pairs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..60),
        c in -5.0f64..5.0,
        a in 0.01f64..10.0,
        b in 0.01f64..10.0,
        rot in 0usize..60,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        prop_assume!(nonconstant(&x) && nonconstant(&y));
        let r = pearson(&x, &y).unwrap();
        let k = ccc(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((-1.0..=1.0).contains(&k));
        prop_assert!(k.abs() <= r.abs() + 1e-12);
        prop_assert!((k - ccc(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!((ccc(&x, &x).unwrap() - 1.0).abs() < 1e-12);

        let xs: Vec<f64> = x.iter().map(|v| v + c).collect();
        let ys: Vec<f64> = y.iter().map(|v| v + c).collect();
        prop_assert!((rmse(&xs, &ys).unwrap() - rmse(&x, &y).unwrap()).abs() < 1e-12);

        let xa: Vec<f64> = x.iter().map(|v| a * v).collect();
        let yb: Vec<f64> = y.iter().map(|v| b * v).collect();
        prop_assert_eq!(sagr(&xa, &yb).unwrap(), sagr(&x, &y).unwrap());

        let k_rot = rot % x.len();
        let (mut xp, mut yp) = (x.clone(), y.clone());
        xp.rotate_left(k_rot);
        yp.rotate_left(k_rot);
        prop_assert!((rmse(&xp, &yp).unwrap() - rmse(&x, &y).unwrap()).abs() < 1e-12);
        prop_assert!((pearson(&xp, &yp).unwrap() - r).abs() < 1e-12);
        prop_assert!((ccc(&xp, &yp).unwrap() - k).abs() < 1e-12);
        prop_assert_eq!(sagr(&xp, &yp).unwrap(), sagr(&x, &y).unwrap());
    }
}
