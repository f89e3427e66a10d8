//! Weighted (trimmed) estimators of average treatment effects.
//!
//! Every estimator has the ratio form `sum w_i tau_i / sum w_i`, where
//! `tau_i` is either the inverse-probability contrast or its augmented
//! (doubly robust) version, and `w_i` comes from a [`WeightSpec`]. ATT
//! estimators are the same ratio with an ATT weight family.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::glm::{fit_mle, PropensityFit};
use crate::outcome::{fit_outcome, OutcomeFit};
use crate::weights::WeightSpec;

/// `a y / e - (1 - a) y / (1 - e)`.
#[inline]
pub fn unit_tau(a: u8, y: f64, e: f64) -> f64 {
    let a = f64::from(a);
    a * y / e - (1.0 - a) * y / (1.0 - e)
}

/// Augmented contrast in residual form:
/// `{a R / e + mu1} - {(1 - a) R / (1 - e) + mu0}` with `R = y - mu(a)`.
#[inline]
pub fn unit_tau_aug(a: u8, y: f64, e: f64, mu1: f64, mu0: f64) -> f64 {
    let resid = y - if a == 1 { mu1 } else { mu0 };
    let a = f64::from(a);
    (a * resid / e + mu1) - ((1.0 - a) * resid / (1.0 - e) + mu0)
}

/// The same contrast written without residuals:
/// `[a y / e + (1 - a / e) mu1] - [(1 - a) y / (1 - e) + (1 - (1 - a) / (1 - e)) mu0]`.
#[inline]
pub fn unit_tau_aug_expanded(a: u8, y: f64, e: f64, mu1: f64, mu0: f64) -> f64 {
    let a = f64::from(a);
    (a * y / e + (1.0 - a / e) * mu1) - ((1.0 - a) * y / (1.0 - e) + (1.0 - (1.0 - a) / (1.0 - e)) * mu0)
}

/// Per-unit pieces of a weighted estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitContribution {
    pub tau_hat: f64,
    /// Present when an outcome fit was supplied.
    pub tau_aug: Option<f64>,
    pub weight: f64,
}

/// Weighted estimate with the effective size of the trimmed population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEstimate {
    pub estimate: f64,
    /// `sum w_i`.
    pub weight_sum: f64,
    /// Units kept by the trimming rule, see [`WeightSpec::retains`].
    pub n_included: usize,
}

pub fn unit_contributions(
    data: &Dataset,
    scores: &[f64],
    spec: &WeightSpec,
    fit: Option<&OutcomeFit>,
) -> Result<Vec<UnitContribution>> {
    check_scores(data, scores)?;
    Ok((0..data.n())
        .map(|i| {
            let (a, y, e) = (data.treatment()[i], data.outcome()[i], scores[i]);
            let tau_aug = fit.map(|f| {
                let x = data.row(i);
                unit_tau_aug(a, y, e, f.predict(1, x), f.predict(0, x))
            });
            UnitContribution { tau_hat: unit_tau(a, y, e), tau_aug, weight: spec.weight(e) }
        })
        .collect())
}

fn check_scores(data: &Dataset, scores: &[f64]) -> Result<()> {
    if scores.len() != data.n() {
        return Err(Error::InvalidInput(format!(
            "{} scores supplied for {} units",
            scores.len(),
            data.n()
        )));
    }
    if let Some(e) = scores.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::InvalidInput(format!("propensity score {e} outside (0, 1)")));
    }
    Ok(())
}

/// `sum w_i tau_i / sum w_i`, using the augmented contrast when `fit` is
/// given. Scores are taken as supplied, so fitted and true propensities share
/// this path.
pub fn trimmed_estimate(
    data: &Dataset,
    scores: &[f64],
    spec: &WeightSpec,
    fit: Option<&OutcomeFit>,
) -> Result<f64> {
    weighted_estimate(data, scores, spec, fit).map(|w| w.estimate)
}

pub fn weighted_estimate(
    data: &Dataset,
    scores: &[f64],
    spec: &WeightSpec,
    fit: Option<&OutcomeFit>,
) -> Result<WeightedEstimate> {
    check_scores(data, scores)?;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut n_included = 0;
    for i in 0..data.n() {
        let (a, y, e) = (data.treatment()[i], data.outcome()[i], scores[i]);
        let w = spec.weight(e);
        if w == 0.0 {
            continue;
        }
        let tau = match fit {
            Some(f) => {
                let x = data.row(i);
                unit_tau_aug(a, y, e, f.predict(1, x), f.predict(0, x))
            }
            None => unit_tau(a, y, e),
        };
        num += w * tau;
        den += w;
        n_included += usize::from(spec.retains(e));
    }
    if !(den > 0.0) {
        let (min_score, max_score) = scores
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        return Err(Error::EmptyPopulation { min_score, max_score });
    }
    let estimate = num / den;
    if !estimate.is_finite() {
        return Err(Error::NonFinite("weighted estimate"));
    }
    Ok(WeightedEstimate { estimate, weight_sum: den, n_included })
}

/// Result of fitting the models and evaluating one estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineEstimate {
    pub estimate: f64,
    pub n_total: usize,
    /// `sum w_i`.
    pub n_effective: f64,
    /// Units kept by the trimming rule.
    pub n_included: usize,
    pub propensity: PropensityFit,
    pub outcome: Option<OutcomeFit>,
}

/// Fits the propensity model (and the outcome model when `augmented`), then
/// evaluates the weighted estimator.
pub fn full_pipeline(data: &Dataset, spec: &WeightSpec, augmented: bool) -> Result<PipelineEstimate> {
    let propensity = fit_mle(data)?;
    let outcome = if augmented { Some(fit_outcome(data)?) } else { None };
    let w = weighted_estimate(data, &propensity.scores, spec, outcome.as_ref())?;
    Ok(PipelineEstimate {
        estimate: w.estimate,
        n_total: data.n(),
        n_effective: w.weight_sum,
        n_included: w.n_included,
        propensity,
        outcome,
    })
}

/// One estimator configuration: a weight function, simple or augmented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub spec: WeightSpec,
    pub augmented: bool,
}

/// Fits the models once and evaluates several estimator variants on them.
pub fn evaluate_variants(data: &Dataset, variants: &[Variant]) -> Result<Vec<f64>> {
    let propensity = fit_mle(data)?;
    let outcome = if variants.iter().any(|v| v.augmented) { Some(fit_outcome(data)?) } else { None };
    variants
        .iter()
        .map(|v| {
            let fit = if v.augmented { outcome.as_ref() } else { None };
            trimmed_estimate(data, &propensity.scores, &v.spec, fit)
        })
        .collect()
}
