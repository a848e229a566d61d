use rand::Rng;
use serde::{Deserialize, Serialize};

use super::quadrature::adaptive_simpson;
use super::MarketError;

/// Density of the users' preference parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PreferenceDensity {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Triangular {
        lo: f64,
        mode: f64,
        hi: f64,
    },
    /// Every user shares one preference.
    PointMass {
        theta: f64,
    },
}

impl PreferenceDensity {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Uniform { lo, hi } | Self::Triangular { lo, hi, .. } => (lo, hi),
            Self::PointMass { theta } => (theta, theta),
        }
    }

    /// Interior points where the density has a kink.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            Self::Triangular { mode, .. } => vec![mode],
            _ => Vec::new(),
        }
    }

    /// Density value; not defined for point masses (returns 0).
    pub fn pdf(&self, theta: f64) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => {
                if (lo..=hi).contains(&theta) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Self::Triangular { lo, mode, hi } => {
                if theta < lo || theta > hi {
                    0.0
                } else if theta <= mode && mode > lo {
                    2.0 * (theta - lo) / ((hi - lo) * (mode - lo))
                } else if theta >= mode && hi > mode {
                    2.0 * (hi - theta) / ((hi - lo) * (hi - mode))
                } else {
                    2.0 / (hi - lo)
                }
            }
            Self::PointMass { .. } => 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Self::Triangular { lo, mode, hi } => {
                let u: f64 = rng.random();
                let split = (mode - lo) / (hi - lo);
                if u < split {
                    lo + (u * (hi - lo) * (mode - lo)).sqrt()
                } else {
                    hi - ((1.0 - u) * (hi - lo) * (hi - mode)).sqrt()
                }
            }
            Self::PointMass { theta } => theta,
        }
    }

    /// Total mass, integrated numerically for continuous densities.
    pub fn mass(&self) -> f64 {
        if let Self::PointMass { .. } = self {
            return 1.0;
        }
        let (lo, hi) = self.support();
        let mut cuts = vec![lo];
        cuts.extend(self.kinks());
        cuts.push(hi);
        cuts.windows(2)
            .map(|w| adaptive_simpson(&|t| self.pdf(t), w[0], w[1], 1e-13))
            .sum()
    }

    pub fn validate(&self) -> Result<(), MarketError> {
        let bad = |m: String| Err(MarketError::InvalidParams(m));
        match *self {
            Self::Uniform { lo, hi } if !(lo > 0.0 && hi > lo) => {
                return bad(format!(
                    "uniform density needs 0 < lo < hi, got [{lo}, {hi}]"
                ))
            }
            Self::Triangular { lo, mode, hi }
                if !(lo > 0.0 && lo <= mode && mode <= hi && hi > lo) =>
            {
                return bad(format!(
                    "triangular density needs 0 < lo <= mode <= hi, got ({lo}, {mode}, {hi})"
                ))
            }
            Self::PointMass { theta } if !(theta > 0.0) => {
                return bad(format!(
                    "point mass must sit at a positive preference, got {theta}"
                ))
            }
            _ => {}
        }
        let mass = self.mass();
        if (mass - 1.0).abs() > 1e-9 {
            return bad(format!("density integrates to {mass}, not 1"));
        }
        Ok(())
    }
}
