//! Nonparametric bootstrap over the whole estimation pipeline.
//!
//! Each replicate resamples units with replacement and refits the propensity
//! model, the outcome model and the weights before re-evaluating the
//! estimator. Replicate `r` draws from stream `(seed, r)`; results are
//! aggregated in replicate order, so serial and parallel runs agree bit for
//! bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimators::{evaluate_variants, Variant};
use crate::rng::stream;
use crate::weights::WeightSpec;

/// Two-sided 95% standard normal quantile.
pub const Z_975: f64 = 1.959964;
/// Largest tolerated share of failed replicates.
pub const MAX_FAILED_SHARE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    #[default]
    Normal,
    Percentile,
}

impl CiMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CiMethod::Normal => "normal",
            CiMethod::Percentile => "percentile",
        }
    }
}

impl fmt::Display for CiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(CiMethod::Normal),
            "percentile" => Ok(CiMethod::Percentile),
            other => Err(Error::InvalidInput(format!("unknown CI method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    pub method: CiMethod,
    pub execution: Execution,
}

impl BootstrapConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        Self { replicates, seed, method: CiMethod::Normal, execution: Execution::Parallel }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    /// Full-sample estimate.
    pub point: f64,
    /// Standard deviation of the replicate estimates.
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Requested replicate count.
    pub b: usize,
    pub failed_replicates: usize,
    pub method: CiMethod,
    /// Estimates of the successful replicates, in replicate order.
    pub estimates: Vec<f64>,
}

/// Bootstrap of a single estimator with a normal-approximation interval.
pub fn bootstrap(data: &Dataset, spec: &WeightSpec, augmented: bool, b: usize, seed: u64) -> Result<BootstrapResult> {
    let variants = [Variant { spec: *spec, augmented }];
    let mut out = bootstrap_variants(data, &variants, &BootstrapConfig::new(b, seed))?;
    Ok(out.remove(0))
}

/// Bootstraps several estimators at once; every replicate refits the models
/// once and evaluates all variants on the same resample. A replicate that
/// fails for any variant is dropped for all of them.
pub fn bootstrap_variants(
    data: &Dataset,
    variants: &[Variant],
    config: &BootstrapConfig,
) -> Result<Vec<BootstrapResult>> {
    let b = config.replicates;
    if b < 2 {
        return Err(Error::InvalidInput("at least 2 bootstrap replicates required".into()));
    }
    let points = evaluate_variants(data, variants)?;

    let run = |r: usize| -> Result<Option<Vec<f64>>> {
        let mut rng = stream(config.seed, r as u64);
        let n = data.n();
        let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        match data.select(&idx).and_then(|d| evaluate_variants(&d, variants)) {
            Ok(v) => Ok(Some(v)),
            Err(e) if e.is_sampling_failure() => Ok(None),
            Err(e) => Err(e),
        }
    };
    let replicates: Vec<Option<Vec<f64>>> = match config.execution {
        Execution::Serial => (0..b).map(run).collect::<Result<_>>()?,
        Execution::Parallel => (0..b).into_par_iter().map(run).collect::<Result<_>>()?,
    };

    let failed = replicates.iter().filter(|r| r.is_none()).count();
    let ok: Vec<&Vec<f64>> = replicates.iter().flatten().collect();
    if failed as f64 > MAX_FAILED_SHARE * b as f64 || ok.len() < 2 {
        return Err(Error::UnstableBootstrap { failed, replicates: b });
    }

    Ok(points
        .iter()
        .enumerate()
        .map(|(k, &point)| {
            let estimates: Vec<f64> = ok.iter().map(|v| v[k]).collect();
            summarize(point, estimates, b, failed, config.method)
        })
        .collect())
}

fn summarize(point: f64, estimates: Vec<f64>, b: usize, failed: usize, method: CiMethod) -> BootstrapResult {
    let se = sample_variance(&estimates).sqrt();
    let (ci_low, ci_high) = match method {
        CiMethod::Normal => (point - Z_975 * se, point + Z_975 * se),
        CiMethod::Percentile => {
            let mut sorted = estimates.clone();
            sorted.sort_by(f64::total_cmp);
            (quantile_sorted(&sorted, 0.025), quantile_sorted(&sorted, 0.975))
        }
    };
    BootstrapResult { point, se, ci_low, ci_high, b, failed_replicates: failed, method, estimates }
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

/// Linear-interpolation quantile of sorted data (the common "type 7" rule).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 5.0);
        assert_eq!(quantile_sorted(&v, 0.5), 3.0);
        assert_eq!(quantile_sorted(&v, 0.125), 1.5);
    }

    #[test]
    fn variance() {
        assert_eq!(sample_variance(&[1.0]), 0.0);
        assert!((sample_variance(&[1.0, 2.0, 3.0, 4.0]) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ci_method_parse() {
        assert_eq!("normal".parse::<CiMethod>().unwrap(), CiMethod::Normal);
        assert_eq!("percentile".parse::<CiMethod>().unwrap(), CiMethod::Percentile);
        assert!("bca".parse::<CiMethod>().is_err());
    }
}
