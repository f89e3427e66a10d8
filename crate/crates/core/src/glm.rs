//! Logistic propensity-score model fitted by Newton-Raphson.
//!
//! The score and information are written for a generic link `e(t)` with
//! derivative `f(t)`; only the logistic link is exposed. Fitted probabilities
//! are floored to `[PROB_FLOOR, 1 - PROB_FLOOR]` so downstream inverse
//! weights stay finite.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, Cholesky, SquareMatrix};

pub const PROB_FLOOR: f64 = 1e-12;
pub const SCORE_TOL: f64 = 1e-10;
pub const REL_STEP_TOL: f64 = 1e-12;
pub const MAX_ITER: usize = 50;
pub const MAX_HALVINGS: usize = 20;
pub const SEPARATION_BOUND: f64 = 30.0;

/// Inverse logit, evaluated without overflow for either sign of `t` and
/// floored away from exact 0 and 1.
#[inline]
pub fn expit(t: f64) -> f64 {
    let p = if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let z = t.exp();
        z / (1.0 + z)
    };
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

/// Derivative of the logistic link, `e(t) (1 - e(t))`. Evaluated at `|t|`
/// so the result is exactly even in `t`.
#[inline]
pub fn link_derivative(t: f64) -> f64 {
    let e = expit(t.abs());
    e * (1.0 - e)
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Borrowed view of the pieces of a dataset the propensity model needs.
#[derive(Debug, Clone, Copy)]
pub struct Design<'a> {
    rows: &'a [f64],
    p: usize,
    treatment: &'a [u8],
}

impl<'a> Design<'a> {
    /// `rows` is row-major with `p` columns and one row per treatment entry.
    pub fn new(rows: &'a [f64], p: usize, treatment: &'a [u8]) -> Self {
        assert!(p > 0 && rows.len() == p * treatment.len(), "design shape mismatch");
        Self { rows, p, treatment }
    }

    pub fn n(&self) -> usize {
        self.treatment.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    fn units(&self) -> impl Iterator<Item = (&'a [f64], f64)> + '_ {
        self.rows.chunks_exact(self.p).zip(self.treatment.iter().map(|&a| f64::from(a)))
    }
}

impl<'a> From<&'a Dataset> for Design<'a> {
    fn from(d: &'a Dataset) -> Self {
        Design::new(d.design(), d.p(), d.treatment())
    }
}

fn check_theta(design: &Design<'_>, theta: &[f64]) -> Result<()> {
    if theta.len() != design.p() {
        return Err(Error::InvalidInput(format!(
            "theta has length {}, design has {} columns",
            theta.len(),
            design.p()
        )));
    }
    Ok(())
}

/// Average Bernoulli log-likelihood `(1/N) sum a log e + (1-a) log(1-e)`.
pub fn log_likelihood<'a>(design: impl Into<Design<'a>>, theta: &[f64]) -> Result<f64> {
    let design = design.into();
    check_theta(&design, theta)?;
    let total: f64 = design
        .units()
        .map(|(x, a)| {
            let e = expit(dot(x, theta));
            a * e.ln() + (1.0 - a) * (1.0 - e).ln()
        })
        .sum();
    Ok(total / design.n() as f64)
}

/// Score `S(theta) = (1/N) sum x (a - e) f / (e (1 - e))`.
pub fn score<'a>(design: impl Into<Design<'a>>, theta: &[f64]) -> Result<Vec<f64>> {
    let design = design.into();
    check_theta(&design, theta)?;
    let mut s = vec![0.0; design.p()];
    for (x, a) in design.units() {
        let t = dot(x, theta);
        let e = expit(t);
        let c = (a - e) * link_derivative(t) / (e * (1.0 - e));
        for (sj, xj) in s.iter_mut().zip(x) {
            *sj += c * xj;
        }
    }
    let n = design.n() as f64;
    s.iter_mut().for_each(|v| *v /= n);
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("score"));
    }
    Ok(s)
}

/// Sample Fisher information `(1/N) sum f^2 / (e (1 - e)) x x'`.
pub fn information<'a>(design: impl Into<Design<'a>>, theta: &[f64]) -> Result<SquareMatrix> {
    let design = design.into();
    check_theta(&design, theta)?;
    let mut info = SquareMatrix::zeros(design.p());
    for (x, _) in design.units() {
        let t = dot(x, theta);
        let e = expit(t);
        let f = link_derivative(t);
        info.add_outer_lower(x, f * f / (e * (1.0 - e)));
    }
    info.symmetrize_from_lower();
    info.scale(1.0 / design.n() as f64);
    Ok(info)
}

/// Fitted propensity model.
#[derive(Debug, Clone, PartialEq)]
pub struct PropensityFit {
    pub theta: Vec<f64>,
    /// Fitted scores `e(x_i' theta)`, each strictly inside (0, 1).
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_grad_norm: f64,
    /// Average log-likelihood at the start and after every accepted step.
    pub log_likelihood_path: Vec<f64>,
}

/// Maximum-likelihood logistic regression by Newton-Raphson from `theta = 0`,
/// halving any step that lowers the likelihood.
pub fn fit_mle<'a>(design: impl Into<Design<'a>>) -> Result<PropensityFit> {
    let design = design.into();
    let treated = design.treatment.iter().filter(|&&a| a == 1).count();
    if treated == 0 || treated == design.n() {
        return Err(Error::DegenerateArm { treated, control: design.n() - treated });
    }
    let p = design.p();
    let mut theta = vec![0.0; p];
    let mut ll = log_likelihood(design, &theta)?;
    let mut path = vec![ll];
    let mut grad = score(design, &theta)?;
    let mut grad_norm = norm2(&grad);
    let mut iterations = 0;
    let mut converged = grad_norm <= SCORE_TOL;

    while !converged {
        if iterations == MAX_ITER {
            return Err(Error::NonConvergence { iterations, grad_norm });
        }
        iterations += 1;
        let info = information(design, &theta)?;
        let chol = Cholesky::new(&info).ok_or(Error::Collinearity("propensity information"))?;
        let step = chol.solve(&grad);

        let mut scale = 1.0;
        let mut candidate = theta.clone();
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            for ((c, t), s) in candidate.iter_mut().zip(&theta).zip(&step) {
                *c = t + scale * s;
            }
            let cand_ll = log_likelihood(design, &candidate)?;
            // Allow for rounding noise once the optimum is reached.
            if cand_ll >= ll - 1e-14 * (1.0 + ll.abs()) {
                accepted = Some(cand_ll);
                break;
            }
            scale *= 0.5;
        }
        let Some(cand_ll) = accepted else {
            // No step improves the likelihood: we are at the optimum to
            // working precision, or the problem is ill-posed.
            if norm2(&step) / norm2(&theta).max(1.0) < 1e-8 {
                converged = true;
                break;
            }
            return Err(Error::NonConvergence { iterations, grad_norm });
        };
        if !cand_ll.is_finite() {
            return Err(Error::NonFinite("log-likelihood"));
        }
        let rel_step = scale * norm2(&step) / norm2(&theta).max(1.0);
        theta = candidate;
        ll = cand_ll;
        path.push(ll);

        if let Some((index, &value)) =
            theta.iter().enumerate().find(|(_, v)| v.abs() > SEPARATION_BOUND)
        {
            return Err(Error::Separation { index, value });
        }
        grad = score(design, &theta)?;
        grad_norm = norm2(&grad);
        converged = grad_norm <= SCORE_TOL || rel_step < REL_STEP_TOL;
    }

    // A perfect fit means the classes are separated even if the coefficients
    // have not yet crossed the divergence bound.
    if ll > -1e-8 {
        let (index, &value) = theta
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("non-empty theta");
        return Err(Error::Separation { index, value });
    }

    let scores = design.rows.chunks_exact(p).map(|x| expit(dot(x, &theta))).collect();
    Ok(PropensityFit {
        theta,
        scores,
        iterations,
        converged,
        final_grad_norm: grad_norm,
        log_likelihood_path: path,
    })
}
