//! Causal effect estimation on propensity-trimmed populations.
//!
//! Units with extreme estimated propensity scores are down-weighted either
//! by the hard indicator `1{alpha1 <= e <= alpha2}` or by its smooth
//! normal-CDF approximation. The smooth version keeps the estimators
//! asymptotically linear, so a bootstrap that refits the propensity model
//! in every replicate gives valid standard errors for the target population.
//!
//! Modules:
//! - [`dataset`]: CSV ingestion and the in-memory data model.
//! - [`glm`]: logistic propensity model (score, information, Newton MLE).
//! - [`outcome`]: per-arm OLS outcome regression.
//! - [`weights`]: indicator, smooth, overlap and ATT weight functions.
//! - [`estimators`]: simple and augmented weighted estimators.
//! - [`bootstrap`]: full-pipeline bootstrap with reproducible streams.
//! - [`att_alpha`]: optimal ATT trimming cutoff.
//! - [`simulation`]: data-generating designs and the Monte Carlo harness.

// Negated comparisons such as `!(x > 0.0)` are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod att_alpha;
pub mod bootstrap;
pub mod dataset;
pub mod error;
pub mod estimators;
pub mod glm;
pub mod linalg;
pub mod outcome;
pub mod rng;
pub mod simulation;
pub mod weights;

pub use att_alpha::{solve_att_alpha, AlphaSolution};
pub use bootstrap::{bootstrap, bootstrap_variants, BootstrapConfig, BootstrapResult, CiMethod, Execution};
pub use dataset::{load_csv, Dataset};
pub use error::{Error, Result};
pub use estimators::{full_pipeline, trimmed_estimate, unit_tau, unit_tau_aug, PipelineEstimate, Variant};
pub use glm::{expit, fit_mle, PropensityFit};
pub use outcome::{fit_outcome, OutcomeFit};
pub use weights::{WeightFamily, WeightSpec};
