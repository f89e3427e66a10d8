//! Monte Carlo estimate of the support-estimation term
//!
//! ```text
//! b1 = E[ d/dtheta { w_eps(X'theta) / E w_eps(X'theta) } tau(X) ]
//!    = ( E[dw tau] E[w] - E[dw] E[w tau] ) / E[w]^2
//! ```
//!
//! at the true coefficient vector, using the analytic weight gradient.

use serde::Serialize;

use super::design::{gen_covariates, OutcomeDesign, PropensityDesign};
use crate::error::{Error, Result};
use crate::glm::{expit, link_derivative};
use crate::linalg::{dot, norm2};
use crate::rng::stream;
use crate::weights::{smooth_weight_de, WeightSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct B1Estimate {
    pub epsilon: f64,
    pub norm: f64,
    /// Delta-method Monte Carlo standard error of `norm`.
    pub se: f64,
    pub vector: Vec<f64>,
}

/// Estimates `b1` from samples of the feature vector (row-major, `p`
/// columns) and the effect surface `tau`, at coefficients `theta`.
pub fn b1_from_samples(features: &[f64], p: usize, theta: &[f64], tau: &[f64], spec: &WeightSpec) -> Result<B1Estimate> {
    let WeightSpec::Smooth { alpha1, alpha2, epsilon } = *spec else {
        return Err(Error::InvalidInput("b1 is defined for the smooth weight family".into()));
    };
    let m = tau.len();
    if m < 2 || features.len() != m * p || theta.len() != p {
        return Err(Error::InvalidInput("sample shapes do not match".into()));
    }
    let rows = || features.chunks_exact(p).zip(tau);
    // dw = c x, with c the scalar part of the weight gradient.
    let per_sample = |x: &[f64]| {
        let lp = dot(x, theta);
        let e = expit(lp);
        let c = smooth_weight_de(e, alpha1, alpha2, epsilon) * link_derivative(lp);
        (spec.weight(e), c)
    };

    let mf = m as f64;
    let (mut w_bar, mut wt_bar) = (0.0, 0.0);
    let mut dw_bar = vec![0.0; p];
    let mut dwt_bar = vec![0.0; p];
    for (x, &t) in rows() {
        let (w, c) = per_sample(x);
        w_bar += w;
        wt_bar += w * t;
        for j in 0..p {
            dw_bar[j] += c * x[j];
            dwt_bar[j] += c * x[j] * t;
        }
    }
    w_bar /= mf;
    wt_bar /= mf;
    dw_bar.iter_mut().for_each(|v| *v /= mf);
    dwt_bar.iter_mut().for_each(|v| *v /= mf);
    if !(w_bar > 0.0) {
        return Err(Error::EmptyPopulation { min_score: f64::NAN, max_score: f64::NAN });
    }

    let w2 = w_bar * w_bar;
    let b: Vec<f64> = (0..p).map(|j| (dwt_bar[j] * w_bar - dw_bar[j] * wt_bar) / w2).collect();
    let norm = norm2(&b);

    // Influence of each sample on u'b, u the direction of b.
    let se = if norm > 0.0 {
        let u: Vec<f64> = b.iter().map(|v| v / norm).collect();
        let ua = dot(&u, &dwt_bar);
        let ub = dot(&u, &dw_bar);
        let (mut s1, mut s2) = (0.0, 0.0);
        for (x, &t) in rows() {
            let (w, c) = per_sample(x);
            let ux = dot(&u, x);
            let dw = w - w_bar;
            let psi = ((c * ux * t - ua) * w_bar + ua * dw - (c * ux - ub) * wt_bar - ub * (w * t - wt_bar)) / w2
                - 2.0 * norm * dw / w_bar;
            s1 += psi;
            s2 += psi * psi;
        }
        let var = (s2 - s1 * s1 / mf) / (mf - 1.0);
        (var.max(0.0) / mf).sqrt()
    } else {
        0.0
    };
    Ok(B1Estimate { epsilon, norm, se, vector: b })
}

/// Evaluates `b1` for each smoothing scale on one common set of `m`
/// covariate draws, using the design's true coefficients and the linear
/// effect surface of outcome design O1.
pub fn b1_epsilon_check(
    design: PropensityDesign,
    epsilons: &[f64],
    m: usize,
    window: (f64, f64),
    seed: u64,
) -> Result<Vec<B1Estimate>> {
    let mut rng = stream(seed, 0);
    let covariates = gen_covariates(m, &mut rng);
    let features: Vec<f64> = covariates.iter().flat_map(|x| design.features(x)).collect();
    let tau: Vec<f64> = covariates.iter().map(|x| OutcomeDesign::O1.effect(x)).collect();
    let theta = design.true_theta();
    epsilons
        .iter()
        .map(|&eps| {
            let spec = WeightSpec::smooth(window.0, window.1, eps)?;
            b1_from_samples(&features, theta.len(), &theta, &tau, &spec)
        })
        .collect()
}
