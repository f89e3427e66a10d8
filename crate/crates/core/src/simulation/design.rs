//! Data-generating designs for the Monte Carlo study: six covariates, four
//! propensity models and two outcome models.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::glm::expit;
use crate::linalg::{Cholesky, SquareMatrix};
use crate::rng::StreamRng;

pub const N_COVARIATES: usize = 6;
pub type Covariates = [f64; N_COVARIATES];

/// Covariance of the trivariate normal block (X1, X2, X3).
pub const NORMAL_BLOCK_COV: [[f64; 3]; 3] = [[2.0, 1.0, -1.0], [1.0, 1.0, -0.5], [-1.0, -0.5, 1.0]];

fn normal_block_factor() -> [[f64; 3]; 3] {
    let sigma = SquareMatrix::from_rows(&NORMAL_BLOCK_COV.map(|r| r.to_vec()));
    let chol = Cholesky::new(&sigma).expect("covariate covariance is positive definite");
    let l = chol.lower();
    std::array::from_fn(|i| std::array::from_fn(|j| l.get(i, j)))
}

/// Draws `n` covariate rows: (X1, X2, X3) trivariate normal with mean zero,
/// X4 ~ U[-3, 3], X5 ~ chi-square(1), X6 ~ Bernoulli(1/2).
pub fn gen_covariates(n: usize, rng: &mut StreamRng) -> Vec<Covariates> {
    let l = normal_block_factor();
    (0..n)
        .map(|_| {
            let z: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let x1 = l[0][0] * z[0];
            let x2 = l[1][0] * z[0] + l[1][1] * z[1];
            let x3 = l[2][0] * z[0] + l[2][1] * z[1] + l[2][2] * z[2];
            let x4 = rng.random_range(-3.0..3.0);
            let z5: f64 = rng.sample(StandardNormal);
            let x6 = f64::from(u8::from(rng.random_bool(0.5)));
            [x1, x2, x3, x4, z5 * z5, x6]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PropensityDesign {
    P1,
    P2,
    P3,
    P4,
}

impl PropensityDesign {
    fn coefficient(self) -> f64 {
        match self {
            PropensityDesign::P1 | PropensityDesign::P3 => 0.1,
            PropensityDesign::P2 | PropensityDesign::P4 => 0.8,
        }
    }

    /// Whether the true score is logistic-linear in the raw covariates.
    pub fn is_linear(self) -> bool {
        matches!(self, PropensityDesign::P1 | PropensityDesign::P2)
    }

    /// Intercept plus the design's covariate transform; the true score is
    /// `expit(features' true_theta)`.
    pub fn features(self, x: &Covariates) -> [f64; 7] {
        let [x1, x2, x3, x4, x5, x6] = *x;
        if self.is_linear() {
            [1.0, x1, x2, x3, x4, x5, x6]
        } else {
            [1.0, x1, x2 * x2, x3 * x3, x4, x5, x6]
        }
    }

    pub fn true_theta(self) -> [f64; 7] {
        let c = self.coefficient();
        [0.0, c, c, c, c, c, c]
    }

    pub fn linear_predictor(self, x: &Covariates) -> f64 {
        self.coefficient() * self.features(x)[1..].iter().sum::<f64>()
    }

    pub fn score(self, x: &Covariates) -> f64 {
        expit(self.linear_predictor(x))
    }
}

pub fn propensity_design(x: &Covariates, design: PropensityDesign) -> f64 {
    design.score(x)
}

impl fmt::Display for PropensityDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for PropensityDesign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P1" => Ok(Self::P1),
            "P2" => Ok(Self::P2),
            "P3" => Ok(Self::P3),
            "P4" => Ok(Self::P4),
            other => Err(Error::InvalidInput(format!("unknown propensity design `{other}` (expected P1..P4)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeDesign {
    O1,
    O2,
}

impl OutcomeDesign {
    /// Treatment effect surface `g(x)`, so that `Y(a) = a g(x) + eta`.
    pub fn effect(self, x: &Covariates) -> f64 {
        let [x1, x2, x3, x4, x5, x6] = *x;
        match self {
            OutcomeDesign::O1 => x1 + x2 + x3 - x4 + x5 + x6,
            OutcomeDesign::O2 => (x1 + x2 + x3).powi(2),
        }
    }
}

/// Draws one potential outcome `a g(x) + eta` with fresh standard normal noise.
pub fn outcome_design(x: &Covariates, a: u8, design: OutcomeDesign, rng: &mut StreamRng) -> f64 {
    let eta: f64 = rng.sample(StandardNormal);
    f64::from(a) * design.effect(x) + eta
}

impl fmt::Display for OutcomeDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for OutcomeDesign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "O1" => Ok(Self::O1),
            "O2" => Ok(Self::O2),
            other => Err(Error::InvalidInput(format!("unknown outcome design `{other}` (expected O1 or O2)"))),
        }
    }
}

/// One simulated study with everything an oracle needs.
#[derive(Debug, Clone)]
pub struct SimulatedStudy {
    /// Observed data; the covariates enter linearly (intercept + X1..X6).
    pub dataset: Dataset,
    pub covariates: Vec<Covariates>,
    pub true_scores: Vec<f64>,
    pub y1: Vec<f64>,
    pub y0: Vec<f64>,
}

impl SimulatedStudy {
    /// Mean of `Y(1) - Y(0)` over units whose true score lies in the window.
    pub fn trimmed_effect(&self, alpha1: f64, alpha2: f64) -> Option<f64> {
        let (sum, count) = self
            .true_scores
            .iter()
            .zip(self.y1.iter().zip(&self.y0))
            .filter(|(e, _)| alpha1 <= **e && **e <= alpha2)
            .fold((0.0, 0usize), |(s, c), (_, (y1, y0))| (s + (y1 - y0), c + 1));
        (count > 0).then(|| sum / count as f64)
    }
}

/// Draws covariates, treatment `A ~ Bernoulli(e(X))` and both potential
/// outcomes. The two potential outcomes share one noise draw per unit.
pub fn simulate_study(
    n: usize,
    propensity: PropensityDesign,
    outcome: OutcomeDesign,
    rng: &mut StreamRng,
) -> Result<SimulatedStudy> {
    let covariates = gen_covariates(n, rng);
    let mut treatment = Vec::with_capacity(n);
    let mut true_scores = Vec::with_capacity(n);
    let mut y1 = Vec::with_capacity(n);
    let mut y0 = Vec::with_capacity(n);
    let mut observed = Vec::with_capacity(n);
    for x in &covariates {
        let e = propensity.score(x);
        let a = u8::from(rng.random::<f64>() < e);
        let eta: f64 = rng.sample(StandardNormal);
        let g = outcome.effect(x);
        true_scores.push(e);
        treatment.push(a);
        y1.push(g + eta);
        y0.push(eta);
        observed.push(if a == 1 { g + eta } else { eta });
    }
    let rows: Vec<Vec<f64>> = covariates.iter().map(|x| x.to_vec()).collect();
    let names = (1..=N_COVARIATES).map(|j| format!("X{j}")).collect();
    let dataset = Dataset::from_covariates(treatment, observed, &rows, names)?;
    Ok(SimulatedStudy { dataset, covariates, true_scores, y1, y0 })
}
