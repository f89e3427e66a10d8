//! Inclusion weights: the hard trimming indicator, its normal-CDF smoothing,
//! the overlap weight and the two ATT variants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{expit, link_derivative};
use crate::linalg::dot;

/// Default smoothing scale.
pub const DEFAULT_EPSILON: f64 = 1e-4;
/// Smoothing scales used for sensitivity analysis.
pub const EPSILON_GRID: [f64; 3] = [1e-3, 1e-4, 1e-5];

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Normal CDF with mean zero and standard deviation `epsilon`, at `z`.
#[inline]
pub fn phi_eps(z: f64, epsilon: f64) -> f64 {
    // erfc keeps full relative accuracy deep into the lower tail.
    0.5 * libm::erfc(-z / (epsilon * std::f64::consts::SQRT_2))
}

/// Normal density with mean zero and standard deviation `epsilon`, at `z`.
#[inline]
pub fn phi_density_eps(z: f64, epsilon: f64) -> f64 {
    let u = z / epsilon;
    FRAC_1_SQRT_2PI * (-0.5 * u * u).exp() / epsilon
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightFamily {
    Indicator,
    Smooth,
    Overlap,
    AttIndicator,
    AttSmooth,
}

impl WeightFamily {
    pub const ALL: [WeightFamily; 5] = [
        WeightFamily::Indicator,
        WeightFamily::Smooth,
        WeightFamily::Overlap,
        WeightFamily::AttIndicator,
        WeightFamily::AttSmooth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightFamily::Indicator => "indicator",
            WeightFamily::Smooth => "smooth",
            WeightFamily::Overlap => "overlap",
            WeightFamily::AttIndicator => "att-indicator",
            WeightFamily::AttSmooth => "att-smooth",
        }
    }

    pub fn is_att(self) -> bool {
        matches!(self, WeightFamily::AttIndicator | WeightFamily::AttSmooth)
    }

    pub fn is_smooth(self) -> bool {
        matches!(self, WeightFamily::Smooth | WeightFamily::AttSmooth)
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown weight family `{s}`")))
    }
}

/// A validated inclusion-weight function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    /// `1{alpha1 <= e <= alpha2}`.
    Indicator { alpha1: f64, alpha2: f64 },
    /// `Phi_eps(e - alpha1) Phi_eps(alpha2 - e)`.
    Smooth { alpha1: f64, alpha2: f64, epsilon: f64 },
    /// `e (1 - e)`.
    Overlap,
    /// `e 1{1 - e >= alpha}`.
    AttIndicator { alpha: f64 },
    /// `Phi_eps(1 - alpha - e) e`.
    AttSmooth { alpha: f64, epsilon: f64 },
}

fn check_window(alpha1: f64, alpha2: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha1) || !(0.0..=1.0).contains(&alpha2) {
        return Err(Error::InvalidInput("alpha1 and alpha2 must lie in [0, 1]".into()));
    }
    if alpha1 >= alpha2 {
        return Err(Error::InvalidInput("alpha1 < alpha2 required".into()));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput("alpha must lie in (0, 1)".into()));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput("epsilon > 0 required".into()));
    }
    Ok(())
}

impl WeightSpec {
    pub fn indicator(alpha1: f64, alpha2: f64) -> Result<Self> {
        check_window(alpha1, alpha2)?;
        Ok(WeightSpec::Indicator { alpha1, alpha2 })
    }

    pub fn smooth(alpha1: f64, alpha2: f64, epsilon: f64) -> Result<Self> {
        check_window(alpha1, alpha2)?;
        check_epsilon(epsilon)?;
        Ok(WeightSpec::Smooth { alpha1, alpha2, epsilon })
    }

    pub fn overlap() -> Self {
        WeightSpec::Overlap
    }

    pub fn att_indicator(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(WeightSpec::AttIndicator { alpha })
    }

    pub fn att_smooth(alpha: f64, epsilon: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_epsilon(epsilon)?;
        Ok(WeightSpec::AttSmooth { alpha, epsilon })
    }

    /// Builds a spec from loosely typed parts, as collected from a command
    /// line. Parameters a family does not use are ignored.
    pub fn from_parts(
        family: WeightFamily,
        alpha1: f64,
        alpha2: f64,
        alpha: Option<f64>,
        epsilon: f64,
    ) -> Result<Self> {
        let need_alpha =
            || alpha.ok_or_else(|| Error::InvalidInput(format!("--alpha is required for {family}")));
        match family {
            WeightFamily::Indicator => Self::indicator(alpha1, alpha2),
            WeightFamily::Smooth => Self::smooth(alpha1, alpha2, epsilon),
            WeightFamily::Overlap => Ok(Self::overlap()),
            WeightFamily::AttIndicator => Self::att_indicator(need_alpha()?),
            WeightFamily::AttSmooth => Self::att_smooth(need_alpha()?, epsilon),
        }
    }

    pub fn family(&self) -> WeightFamily {
        match self {
            WeightSpec::Indicator { .. } => WeightFamily::Indicator,
            WeightSpec::Smooth { .. } => WeightFamily::Smooth,
            WeightSpec::Overlap => WeightFamily::Overlap,
            WeightSpec::AttIndicator { .. } => WeightFamily::AttIndicator,
            WeightSpec::AttSmooth { .. } => WeightFamily::AttSmooth,
        }
    }

    pub fn window(&self) -> Option<(f64, f64)> {
        match *self {
            WeightSpec::Indicator { alpha1, alpha2 } | WeightSpec::Smooth { alpha1, alpha2, .. } => {
                Some((alpha1, alpha2))
            }
            _ => None,
        }
    }

    pub fn att_alpha(&self) -> Option<f64> {
        match *self {
            WeightSpec::AttIndicator { alpha } | WeightSpec::AttSmooth { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            WeightSpec::Smooth { epsilon, .. } | WeightSpec::AttSmooth { epsilon, .. } => Some(epsilon),
            _ => None,
        }
    }

    /// Weight assigned to a unit with propensity score `e`.
    #[inline]
    pub fn weight(&self, e: f64) -> f64 {
        match *self {
            WeightSpec::Indicator { alpha1, alpha2 } => f64::from(u8::from(alpha1 <= e && e <= alpha2)),
            WeightSpec::Smooth { alpha1, alpha2, epsilon } => {
                phi_eps(e - alpha1, epsilon) * phi_eps(alpha2 - e, epsilon)
            }
            WeightSpec::Overlap => e * (1.0 - e),
            WeightSpec::AttIndicator { alpha } => {
                if 1.0 - e >= alpha {
                    e
                } else {
                    0.0
                }
            }
            WeightSpec::AttSmooth { alpha, epsilon } => phi_eps(1.0 - alpha - e, epsilon) * e,
        }
    }

    /// Whether a unit counts as kept: the trimming factor of its weight
    /// (the weight without any `e` or `e(1 - e)` tilt) exceeds one half.
    /// Overlap weights trim nobody.
    pub fn retains(&self, e: f64) -> bool {
        match *self {
            WeightSpec::Indicator { alpha1, alpha2 } => alpha1 <= e && e <= alpha2,
            WeightSpec::Smooth { .. } => self.weight(e) > 0.5,
            WeightSpec::Overlap => true,
            WeightSpec::AttIndicator { alpha } => 1.0 - e >= alpha,
            WeightSpec::AttSmooth { alpha, epsilon } => phi_eps(1.0 - alpha - e, epsilon) > 0.5,
        }
    }

    /// Mirror image under relabelling treatment and control (`e -> 1 - e`).
    /// Only defined for the symmetric two-sided and overlap families.
    pub fn mirrored(&self) -> Option<Self> {
        match *self {
            WeightSpec::Indicator { alpha1, alpha2 } => {
                Some(WeightSpec::Indicator { alpha1: 1.0 - alpha2, alpha2: 1.0 - alpha1 })
            }
            WeightSpec::Smooth { alpha1, alpha2, epsilon } => {
                Some(WeightSpec::Smooth { alpha1: 1.0 - alpha2, alpha2: 1.0 - alpha1, epsilon })
            }
            WeightSpec::Overlap => Some(WeightSpec::Overlap),
            _ => None,
        }
    }
}

pub fn weight(spec: &WeightSpec, e: f64) -> f64 {
    spec.weight(e)
}

/// Gradient in `theta` of the smooth two-sided weight evaluated at
/// `e(x' theta)`:
/// `[phi(e - a1) Phi(a2 - e) - Phi(e - a1) phi(a2 - e)] f(x' theta) x`.
pub fn smooth_weight_dtheta(x: &[f64], theta: &[f64], spec: &WeightSpec) -> Result<Vec<f64>> {
    let WeightSpec::Smooth { alpha1, alpha2, epsilon } = *spec else {
        return Err(Error::InvalidInput(format!(
            "weight derivative is defined for the smooth family, got {}",
            spec.family()
        )));
    };
    if x.len() != theta.len() {
        return Err(Error::InvalidInput("x and theta lengths differ".into()));
    }
    let t = dot(x, theta);
    let c = smooth_weight_de(expit(t), alpha1, alpha2, epsilon) * link_derivative(t);
    Ok(x.iter().map(|xj| c * xj).collect())
}

/// Derivative of the smooth two-sided weight with respect to the score `e`.
#[inline]
pub(crate) fn smooth_weight_de(e: f64, alpha1: f64, alpha2: f64, epsilon: f64) -> f64 {
    phi_density_eps(e - alpha1, epsilon) * phi_eps(alpha2 - e, epsilon)
        - phi_eps(e - alpha1, epsilon) * phi_density_eps(alpha2 - e, epsilon)
}
