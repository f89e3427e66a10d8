mod common;

use common::{logistic_dataset, symmetric_eigenvalues};
use trimweight::glm::{fit_mle, information, log_likelihood, logit, score, Design};
use trimweight::linalg::norm2;
use trimweight::Dataset;

fn fd_gradient(d: &Dataset, theta: &[f64], h: f64) -> Vec<f64> {
    (0..theta.len())
        .map(|j| {
            let mut up = theta.to_vec();
            let mut dn = theta.to_vec();
            up[j] += h;
            dn[j] -= h;
            (log_likelihood(d, &up).unwrap() - log_likelihood(d, &dn).unwrap()) / (2.0 * h)
        })
        .collect()
}

#[test]
fn score_matches_finite_difference_gradient() {
    let d = logistic_dataset(10, &[0.3, -0.8], 11);
    let theta = [0.2, -0.1];
    let s = score(&d, &theta).unwrap();
    let fd = fd_gradient(&d, &theta, 1e-6);
    for (a, b) in s.iter().zip(&fd) {
        assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-3), "{a} vs {b}");
    }
}

#[test]
fn logistic_score_simplifies() {
    let d = logistic_dataset(40, &[0.1, 0.5, -0.4], 5);
    let theta = [0.3, -0.2, 0.6];
    let s = score(&d, &theta).unwrap();
    let mut simple = vec![0.0; 3];
    for i in 0..d.n() {
        let x = d.row(i);
        let e = trimweight::expit(x.iter().zip(&theta).map(|(a, b)| a * b).sum());
        for j in 0..3 {
            simple[j] += x[j] * (f64::from(d.treatment()[i]) - e) / d.n() as f64;
        }
    }
    for (a, b) in s.iter().zip(&simple) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn information_is_negated_hessian() {
    let d = logistic_dataset(20, &[0.2, 0.7, -0.5], 3);
    let theta = [0.1, 0.3, -0.2];
    let info = information(&d, &theta).unwrap();
    let h = 1e-4;
    let ll = |t: &[f64]| log_likelihood(&d, t).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let shifted = |si: f64, sj: f64| {
                let mut t = theta.to_vec();
                t[i] += si;
                t[j] += sj;
                ll(&t)
            };
            let hess = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h);
            let v = info.get(i, j);
            assert!((v + hess).abs() <= 1e-5 * v.abs().max(1e-2), "({i},{j}): {v} vs {}", -hess);
        }
    }
}

#[test]
fn information_symmetric_and_psd() {
    let d = logistic_dataset(20, &[0.0, 1.0, -1.0, 0.5], 9);
    let info = information(&d, &[0.4, -0.3, 0.2, 0.1]).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(info.get(i, j), info.get(j, i));
        }
    }
    let eig = symmetric_eigenvalues(info.rows());
    let tr = info.trace();
    assert!(eig.iter().all(|&l| l >= -1e-12 * tr), "{eig:?}");
}

#[test]
fn intercept_only_mle() {
    let a = vec![1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
    let d = Dataset::from_design(a, vec![0.0; 10], vec![1.0; 10], vec!["(intercept)".into()]).unwrap();
    let fit = fit_mle(&d).unwrap();
    assert!((fit.theta[0] - logit(0.3)).abs() <= 1e-10);
    assert!(fit.scores.iter().all(|&e| (e - 0.3).abs() < 1e-10));
}

#[test]
fn mle_matches_grid_search() {
    let d = logistic_dataset(50, &[0.4, -1.1], 21);
    let fit = fit_mle(&d).unwrap();
    // Oracle: exhaustive grid over [-3, 3]^2 at resolution 0.01.
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=600 {
        for j in 0..=600 {
            let t = [-3.0 + 0.01 * i as f64, -3.0 + 0.01 * j as f64];
            let ll = log_likelihood(&d, &t).unwrap();
            if ll > best.0 {
                best = (ll, t[0], t[1]);
            }
        }
    }
    assert!((fit.theta[0] - best.1).abs() <= 0.01, "{:?} vs {best:?}", fit.theta);
    assert!((fit.theta[1] - best.2).abs() <= 0.01, "{:?} vs {best:?}", fit.theta);
}

#[test]
fn converged_fit_satisfies_first_order_condition() {
    for seed in 0..8 {
        let d = logistic_dataset(200, &[-0.5, 1.0, 0.5, -0.7], seed);
        let fit = fit_mle(&d).unwrap();
        assert!(fit.converged);
        assert!(fit.final_grad_norm <= 1e-10);
        assert!(norm2(&score(&d, &fit.theta).unwrap()) <= 1e-10);
        assert!(fit.scores.iter().all(|&e| e > 0.0 && e < 1.0));
    }
}

#[test]
fn log_likelihood_never_decreases() {
    for seed in 0..8 {
        let d = logistic_dataset(150, &[1.5, 2.5, -2.0], 100 + seed);
        let fit = fit_mle(&d).unwrap();
        for w in fit.log_likelihood_path.windows(2) {
            assert!(w[1] >= w[0] - 1e-14 * (1.0 + w[0].abs()), "{:?}", fit.log_likelihood_path);
        }
    }
}

#[test]
fn fit_invariant_to_row_permutation() {
    let d = logistic_dataset(120, &[0.2, 0.9, -0.4], 42);
    let mut order: Vec<usize> = (0..d.n()).collect();
    order.reverse();
    order.rotate_left(37);
    let shuffled = d.select(&order).unwrap();
    let a = fit_mle(&d).unwrap();
    let b = fit_mle(&shuffled).unwrap();
    for (x, y) in a.theta.iter().zip(&b.theta) {
        assert!((x - y).abs() <= 1e-12);
    }
}

#[test]
fn design_view_accepts_raw_rows() {
    let rows = [1.0, 1.0];
    let a = [1u8, 0];
    let fit = fit_mle(Design::new(&rows, 1, &a)).unwrap();
    assert!(fit.theta[0].abs() < 1e-12);
}
