#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use trimweight::rng::stream;
use trimweight::{expit, Dataset};

/// Random logistic-model dataset with `k` covariates plus intercept.
pub fn logistic_dataset(n: usize, theta: &[f64], seed: u64) -> Dataset {
    let k = theta.len() - 1;
    let mut rng = stream(seed, 0);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.sample(StandardNormal)).collect()).collect();
    loop {
        let a: Vec<u8> = rows
            .iter()
            .map(|x| {
                let t = theta[0] + x.iter().zip(&theta[1..]).map(|(u, v)| u * v).sum::<f64>();
                u8::from(rng.random::<f64>() < expit(t))
            })
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .zip(&a)
            .map(|(x, &ai)| 1.0 + x.iter().sum::<f64>() + 2.0 * f64::from(ai) + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let names = (1..=k).map(|j| format!("x{j}")).collect();
        if let Ok(d) = Dataset::from_covariates(a, y, &rows, names) {
            return d;
        }
    }
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}
