mod common;

use common::logistic_dataset;
use trimweight::outcome::predict;
use trimweight::{fit_outcome, Dataset};

fn arm_sse(d: &Dataset, arm: u8, beta: &[f64]) -> f64 {
    (0..d.n())
        .filter(|&i| d.treatment()[i] == arm)
        .map(|i| {
            let fitted: f64 = d.row(i).iter().zip(beta).map(|(x, b)| x * b).sum();
            (d.outcome()[i] - fitted).powi(2)
        })
        .sum()
}

/// Coarse-to-fine grid search over two coefficients.
fn grid_refine(d: &Dataset, arm: u8) -> [f64; 2] {
    let mut center = [0.0, 0.0];
    let mut half = 20.0;
    for _ in 0..14 {
        let mut best = (f64::INFINITY, center);
        for i in -10..=10 {
            for j in -10..=10 {
                let b = [center[0] + half * i as f64 / 10.0, center[1] + half * j as f64 / 10.0];
                let s = arm_sse(d, arm, &b);
                if s < best.0 {
                    best = (s, b);
                }
            }
        }
        center = best.1;
        half *= 0.3;
    }
    center
}

#[test]
fn ols_matches_grid_search() {
    let d = logistic_dataset(30, &[0.0, 0.6], 8);
    let fit = fit_outcome(&d).unwrap();
    for arm in [0u8, 1] {
        let oracle = grid_refine(&d, arm);
        let beta = fit.coefficients(arm);
        for j in 0..2 {
            assert!((beta[j] - oracle[j]).abs() <= 1e-3, "arm {arm}: {beta:?} vs {oracle:?}");
        }
    }
}

#[test]
fn residuals_orthogonal_to_design_columns() {
    let d = logistic_dataset(300, &[0.2, 0.5, -0.5, 0.3], 17);
    let fit = fit_outcome(&d).unwrap();
    let r = fit.residuals(&d);
    for arm in [0u8, 1] {
        let mut arm_sum = 0.0;
        for col in 0..d.p() {
            let dot: f64 = (0..d.n())
                .filter(|&i| d.treatment()[i] == arm)
                .map(|i| d.row(i)[col] * r[i])
                .sum();
            assert!(dot.abs() <= 1e-8 * d.n() as f64, "arm {arm} col {col}: {dot}");
            if col == 0 {
                arm_sum = dot;
            }
        }
        assert!(arm_sum.abs() <= 1e-9);
    }
}

#[test]
fn refit_is_bit_identical() {
    let d = logistic_dataset(200, &[0.1, 0.4, 0.4], 23);
    let a = fit_outcome(&d).unwrap();
    let b = fit_outcome(&d).unwrap();
    assert_eq!(a, b);
}

#[test]
fn residuals_use_own_arm() {
    let d = logistic_dataset(100, &[0.0, 0.5], 4);
    let fit = fit_outcome(&d).unwrap();
    let r = fit.residuals(&d);
    for i in 0..d.n() {
        let a = d.treatment()[i];
        assert_eq!(r[i], d.outcome()[i] - predict(&fit, a, d.row(i)));
    }
}
