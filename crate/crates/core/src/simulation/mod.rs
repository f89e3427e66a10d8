//! Monte Carlo harness: simulated studies, the scenario runner that
//! tabulates mean / variance / bootstrap variance per estimator, and the
//! Monte Carlo check of the support-estimation term `b1`.

mod b1;
mod design;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

pub use b1::{b1_epsilon_check, b1_from_samples, B1Estimate};
pub use design::{
    gen_covariates, outcome_design, propensity_design, simulate_study, Covariates, OutcomeDesign,
    PropensityDesign, SimulatedStudy, NORMAL_BLOCK_COV, N_COVARIATES,
};

use crate::bootstrap::{bootstrap_variants, sample_variance, BootstrapConfig, Execution};
use crate::error::{Error, Result};
use crate::estimators::{evaluate_variants, Variant};
use crate::rng::{derive_seed, stream};
use crate::weights::WeightSpec;

/// Largest tolerated share of failed replications.
pub const MAX_FAILED_REPLICATIONS: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub propensity: PropensityDesign,
    pub outcome: OutcomeDesign,
    pub n: usize,
    pub reps: usize,
    /// Bootstrap replicates per replication; 0 skips variance estimation.
    pub bootstrap_b: usize,
    pub epsilon_grid: Vec<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
    pub seed: u64,
    pub execution: Execution,
}

impl ScenarioConfig {
    pub fn new(propensity: PropensityDesign, outcome: OutcomeDesign) -> Self {
        Self {
            propensity,
            outcome,
            n: 500,
            reps: 1000,
            bootstrap_b: 100,
            epsilon_grid: vec![1e-4, 1e-5],
            alpha1: 0.1,
            alpha2: 0.9,
            seed: 0,
            execution: Execution::Parallel,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 50 {
            return Err(Error::InvalidInput("scenario sample size must be at least 50".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidInput("at least one replication required".into()));
        }
        if self.bootstrap_b == 1 {
            return Err(Error::InvalidInput("bootstrap needs 0 (off) or at least 2 replicates".into()));
        }
        WeightSpec::indicator(self.alpha1, self.alpha2)?;
        for &eps in &self.epsilon_grid {
            WeightSpec::smooth(self.alpha1, self.alpha2, eps)?;
        }
        Ok(())
    }

    /// Estimators evaluated in every replication, with their table labels.
    pub fn estimators(&self) -> Vec<EstimatorLabel> {
        let ind = WeightSpec::Indicator { alpha1: self.alpha1, alpha2: self.alpha2 };
        let mut out = vec![
            EstimatorLabel::new("tau_hat", None, ind, false),
            EstimatorLabel::new("tau_hat_aug", None, ind, true),
        ];
        for &epsilon in &self.epsilon_grid {
            let sm = WeightSpec::Smooth { alpha1: self.alpha1, alpha2: self.alpha2, epsilon };
            out.push(EstimatorLabel::new("tau_hat_eps", Some(epsilon), sm, false));
            out.push(EstimatorLabel::new("tau_hat_eps_aug", Some(epsilon), sm, true));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorLabel {
    pub label: &'static str,
    pub epsilon: Option<f64>,
    pub variant: Variant,
}

impl EstimatorLabel {
    fn new(label: &'static str, epsilon: Option<f64>, spec: WeightSpec, augmented: bool) -> Self {
        Self { label, epsilon, variant: Variant { spec, augmented } }
    }
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRow {
    pub estimator: String,
    pub epsilon: Option<f64>,
    pub mean: f64,
    /// Monte Carlo variance across replications.
    pub var: f64,
    /// Mean bootstrap variance estimate; absent when the bootstrap is off.
    pub ve: Option<f64>,
    /// Mean over replications of the trimmed benchmark effect.
    pub true_tau_o: f64,
}

/// Raw output of one successful replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub index: usize,
    pub tau_o: f64,
    /// One entry per estimator, in [`ScenarioConfig::estimators`] order.
    pub estimates: Vec<f64>,
    pub bootstrap_variances: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub estimators: Vec<EstimatorLabel>,
    pub rows: Vec<ScenarioRow>,
    pub replications: Vec<Replication>,
    pub failed: usize,
}

impl ScenarioReport {
    pub fn row(&self, label: &str, epsilon: Option<f64>) -> Option<&ScenarioRow> {
        self.rows.iter().find(|r| r.estimator == label && r.epsilon == epsilon)
    }

    /// Per-replication estimates of one estimator.
    pub fn series(&self, label: &str, epsilon: Option<f64>) -> Option<Vec<f64>> {
        let k = self.estimators.iter().position(|e| e.label == label && e.epsilon == epsilon)?;
        Some(self.replications.iter().map(|r| r.estimates[k]).collect())
    }

    pub fn tau_o_series(&self) -> Vec<f64> {
        self.replications.iter().map(|r| r.tau_o).collect()
    }
}

fn run_replication(config: &ScenarioConfig, estimators: &[Variant], index: usize) -> Result<Replication> {
    let mut rng = stream(config.seed, index as u64);
    let study = simulate_study(config.n, config.propensity, config.outcome, &mut rng)?;
    let tau_o = study.trimmed_effect(config.alpha1, config.alpha2).ok_or(Error::EmptyPopulation {
        min_score: study.true_scores.iter().copied().fold(f64::INFINITY, f64::min),
        max_score: study.true_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })?;
    let estimates = evaluate_variants(&study.dataset, estimators)?;
    let bootstrap_variances = if config.bootstrap_b > 0 {
        let boot = BootstrapConfig {
            replicates: config.bootstrap_b,
            seed: derive_seed(config.seed, index as u64),
            method: Default::default(),
            execution: Execution::Serial,
        };
        let results = bootstrap_variants(&study.dataset, estimators, &boot)?;
        Some(results.iter().map(|r| r.se * r.se).collect())
    } else {
        None
    };
    Ok(Replication { index, tau_o, estimates, bootstrap_variances })
}

/// Runs every replication of a scenario and summarises each estimator.
/// Replications that fail for sampling reasons are dropped and counted; more
/// than 2% failures is an error.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let estimators = config.estimators();
    let variants: Vec<Variant> = estimators.iter().map(|e| e.variant).collect();

    let run = |r: usize| -> Result<Option<Replication>> {
        match run_replication(config, &variants, r) {
            Ok(rep) => Ok(Some(rep)),
            Err(e) if e.is_sampling_failure() || matches!(e, Error::UnstableBootstrap { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let results: Vec<Option<Replication>> = match config.execution {
        Execution::Serial => (0..config.reps).map(run).collect::<Result<_>>()?,
        Execution::Parallel => (0..config.reps).into_par_iter().map(run).collect::<Result<_>>()?,
    };
    let failed = results.iter().filter(|r| r.is_none()).count();
    if failed as f64 > MAX_FAILED_REPLICATIONS * config.reps as f64 {
        return Err(Error::UnstableSimulation { failed, replications: config.reps });
    }
    let replications: Vec<Replication> = results.into_iter().flatten().collect();

    let tau_o: Vec<f64> = replications.iter().map(|r| r.tau_o).collect();
    let true_tau_o = mean(&tau_o);
    let mut rows = vec![ScenarioRow {
        estimator: "tau_O".into(),
        epsilon: None,
        mean: true_tau_o,
        var: sample_variance(&tau_o),
        ve: None,
        true_tau_o,
    }];
    for (k, est) in estimators.iter().enumerate() {
        let values: Vec<f64> = replications.iter().map(|r| r.estimates[k]).collect();
        let ve = (config.bootstrap_b > 0).then(|| {
            let v: Vec<f64> = replications
                .iter()
                .map(|r| r.bootstrap_variances.as_ref().expect("bootstrap enabled")[k])
                .collect();
            mean(&v)
        });
        rows.push(ScenarioRow {
            estimator: est.label.to_string(),
            epsilon: est.epsilon,
            mean: mean(&values),
            var: sample_variance(&values),
            ve,
            true_tau_o,
        });
    }
    Ok(ScenarioReport { config: config.clone(), estimators, rows, replications, failed })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Writes the rows as CSV with columns `estimator,epsilon,mean,var,ve,tau_O`.
pub fn write_rows_csv<W: Write>(rows: &[ScenarioRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["estimator", "epsilon", "mean", "var", "ve", "tau_O"])?;
    for r in rows {
        w.write_record([
            r.estimator.clone(),
            r.epsilon.map(|e| format!("{e:e}")).unwrap_or_default(),
            r.mean.to_string(),
            r.var.to_string(),
            r.ve.map(|v| v.to_string()).unwrap_or_default(),
            r.true_tau_o.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned text table: estimator, epsilon, mean, var, ve.
pub fn format_table(rows: &[ScenarioRow]) -> String {
    let mut out = format!("{:<18}{:>8}{:>10}{:>10}{:>10}\n", "estimator", "eps", "mean", "var", "ve");
    for r in rows {
        let eps = r.epsilon.map(|e| format!("{e:.0e}")).unwrap_or_else(|| "-".into());
        let (var, ve) = if r.estimator == "tau_O" {
            (String::new(), String::new())
        } else {
            (format!("{:.4}", r.var), r.ve.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()))
        };
        out.push_str(&format!("{:<18}{:>8}{:>10.2}{:>10}{:>10}\n", r.estimator, eps, r.mean, var, ve));
    }
    out
}
