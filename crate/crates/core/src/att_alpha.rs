//! Optimal ATT trimming cutoff.
//!
//! Under homoskedastic outcomes the variance-minimising ATT population is
//! `{x : 1 - e(x) >= alpha}`, with `alpha` the smallest solution of
//!
//! ```text
//! 1/alpha = 2 * sum e_i^2 {1/e_i + 1/(1-e_i)} 1{1-e_i >= alpha}
//!             / sum e_i 1{1-e_i >= alpha}
//! ```
//!
//! The right-hand side only changes where `alpha` crosses a value of
//! `1 - e_i`, so it is constant on each interval between consecutive order
//! statistics and the equation is solved exactly piece by piece.

use serde::Serialize;

use crate::error::{Error, Result};

pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSolution {
    pub alpha: f64,
    /// Share of units with `1 - e_i >= alpha`.
    pub retained_fraction: f64,
    /// `|1/alpha - rhs(alpha)|`.
    pub residual: f64,
}

/// Right-hand side of the cutoff equation at `alpha`, or `None` when no unit
/// satisfies `1 - e_i >= alpha`.
pub fn att_rhs(scores: &[f64], alpha: f64) -> Option<f64> {
    let (num, den) = scores
        .iter()
        .filter(|&&e| 1.0 - e >= alpha)
        .fold((0.0, 0.0), |(n, d), &e| (n + e * e * (1.0 / e + 1.0 / (1.0 - e)), d + e));
    (den > 0.0).then(|| 2.0 * num / den)
}

pub fn solve_att_alpha(scores: &[f64]) -> Result<AlphaSolution> {
    if scores.is_empty() {
        return Err(Error::InvalidInput("no propensity scores".into()));
    }
    if let Some(e) = scores.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::InvalidInput(format!("propensity score {e} outside (0, 1)")));
    }

    // Units ordered by decreasing 1 - e; the retained set for alpha in
    // (u_(k+1), u_(k)] is the first k of them.
    let mut units: Vec<(f64, f64)> = scores.iter().map(|&e| (1.0 - e, e)).collect();
    units.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut pieces = Vec::new();
    let (mut num, mut den) = (0.0, 0.0);
    let mut i = 0;
    while i < units.len() {
        let upper = units[i].0;
        while i < units.len() && units[i].0 == upper {
            let e = units[i].1;
            num += e * e * (1.0 / e + 1.0 / (1.0 - e));
            den += e;
            i += 1;
        }
        let lower = units.get(i).map_or(0.0, |u| u.0);
        pieces.push((lower, upper, 2.0 * num / den, i));
    }

    // Pieces run from high alpha to low; the smallest solution is the
    // accepted candidate of the lowest piece.
    let n = scores.len() as f64;
    for &(lower, upper, rhs, retained) in pieces.iter().rev() {
        let alpha = 1.0 / rhs;
        if alpha > lower && alpha <= upper && alpha < 1.0 {
            let residual = (1.0 / alpha - rhs).abs();
            debug_assert!(residual <= RESIDUAL_TOL / alpha);
            return Ok(AlphaSolution { alpha, retained_fraction: retained as f64 / n, residual });
        }
    }
    let (rhs_min, rhs_max) = pieces
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.2), hi.max(p.2)));
    Err(Error::NoSolution { rhs_min, rhs_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_half() {
        let s = solve_att_alpha(&[0.5; 8]).unwrap();
        assert_eq!(s.alpha, 0.25);
        assert_eq!(s.retained_fraction, 1.0);
        assert_eq!(att_rhs(&[0.5; 8], 0.25), Some(4.0));
    }

    #[test]
    fn constant_tenth() {
        let s = solve_att_alpha(&[0.1; 5]).unwrap();
        assert!((s.alpha - 0.45).abs() < 1e-6);
        assert!(s.residual <= RESIDUAL_TOL / s.alpha);
    }

    #[test]
    fn rejects_bad_scores() {
        assert!(solve_att_alpha(&[]).is_err());
        assert!(solve_att_alpha(&[0.5, 1.0]).is_err());
    }

    #[test]
    fn smallest_of_several_solutions() {
        // Both the top piece (alpha = 0.475, only the e = 0.05 units kept)
        // and the bottom piece (everyone kept) solve the equation.
        let mut scores = vec![0.05; 4];
        scores.extend([0.6; 4]);
        let top = 0.475;
        assert!((1.0 / top - att_rhs(&scores, top).unwrap()).abs() < 1e-12);
        let s = solve_att_alpha(&scores).unwrap();
        let expected = 0.65 / (2.0 * (0.05 / 0.95 + 1.5));
        assert!((s.alpha - expected).abs() < 1e-12);
        assert_eq!(s.retained_fraction, 1.0);
    }

    #[test]
    fn drops_extreme_treated_like_unit() {
        let mut scores = vec![0.01; 1000];
        scores.push(0.99);
        let s = solve_att_alpha(&scores).unwrap();
        assert!((s.alpha - 0.495).abs() < 1e-12);
        assert!((s.retained_fraction - 1000.0 / 1001.0).abs() < 1e-15);
    }
}
