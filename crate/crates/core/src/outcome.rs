//! Per-arm linear outcome regression used by the augmented estimators.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky, SquareMatrix};

/// OLS coefficients for each treatment arm, both of length p.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeFit {
    pub beta0: Vec<f64>,
    pub beta1: Vec<f64>,
}

impl OutcomeFit {
    pub fn coefficients(&self, arm: u8) -> &[f64] {
        if arm == 1 {
            &self.beta1
        } else {
            &self.beta0
        }
    }

    /// Predicted mean outcome `mu(arm, x)`.
    #[inline]
    pub fn predict(&self, arm: u8, x: &[f64]) -> f64 {
        dot(self.coefficients(arm), x)
    }

    /// Residuals `y_i - mu(a_i, x_i)` over the dataset.
    pub fn residuals(&self, data: &Dataset) -> Vec<f64> {
        (0..data.n())
            .map(|i| data.outcome()[i] - self.predict(data.treatment()[i], data.row(i)))
            .collect()
    }
}

pub fn predict(fit: &OutcomeFit, arm: u8, x: &[f64]) -> f64 {
    fit.predict(arm, x)
}

/// Fits `Y ~ X` separately within each arm through the normal equations.
/// Goodness of fit is never checked; a misspecified linear model is allowed.
pub fn fit_outcome(data: &Dataset) -> Result<OutcomeFit> {
    Ok(OutcomeFit { beta0: fit_arm(data, 0)?, beta1: fit_arm(data, 1)? })
}

fn fit_arm(data: &Dataset, arm: u8) -> Result<Vec<f64>> {
    let p = data.p();
    let mut xtx = SquareMatrix::zeros(p);
    let mut xty = vec![0.0; p];
    let mut size = 0;
    for (i, x) in data.rows().enumerate() {
        if data.treatment()[i] != arm {
            continue;
        }
        size += 1;
        xtx.add_outer_lower(x, 1.0);
        let y = data.outcome()[i];
        for (acc, xj) in xty.iter_mut().zip(x) {
            *acc += xj * y;
        }
    }
    if size < p {
        return Err(Error::InsufficientData { arm, size, needed: p });
    }
    xtx.symmetrize_from_lower();
    let chol = Cholesky::new(&xtx).ok_or(Error::Collinearity("outcome regression"))?;
    let beta = chol.solve(&xty);
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite("outcome coefficients"));
    }
    Ok(beta)
}
