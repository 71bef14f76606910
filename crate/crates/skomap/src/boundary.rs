//! Analytic boundary families for the pinch experiments.
//!
//! Each family describes a moving interval through its gap profile and is
//! discretized onto a grid when a solve needs it. The power-law families
//! pinch (gap reaching zero) at one or both ends of `[0, tau]`; the exponent
//! `alpha` controls how fast the gap closes and decides whether the
//! constraint term of reflected Brownian motion keeps finite variation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::path::{BoundaryPair, GridPath};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// Gap `(tau - t)^alpha`, symmetric around zero: open at `t = 0`,
    /// pinching at `tau`.
    ClosingCusp { alpha: f64, tau: f64 },
    /// Gap `t^alpha`, symmetric around zero: pinched at `t = 0`, opening
    /// afterwards (constant past `tau`).
    OpeningCusp { alpha: f64, tau: f64 },
    /// `upper = -lower = min(t, tau - t)^alpha`: pinched at both ends.
    SymmetricCusp { alpha: f64, tau: f64 },
    /// Constant interval of the given width, symmetric around zero.
    ConstantGap { gap: f64, tau: f64 },
    /// Explicit càdlàg step boundaries given by breakpoints.
    Custom {
        times: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

impl BoundarySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            BoundarySpec::ClosingCusp { alpha, tau }
            | BoundarySpec::OpeningCusp { alpha, tau }
            | BoundarySpec::SymmetricCusp { alpha, tau } => {
                if !(*alpha > 0.0) {
                    return Err(Error::domain("alpha must be positive"));
                }
                if !(*tau > 0.0 && tau.is_finite()) {
                    return Err(Error::domain("tau must be finite and positive"));
                }
            }
            BoundarySpec::ConstantGap { gap, tau } => {
                if !(*gap >= 0.0) {
                    return Err(Error::domain("gap must be non-negative"));
                }
                if !(*tau > 0.0 && tau.is_finite()) {
                    return Err(Error::domain("tau must be finite and positive"));
                }
            }
            BoundarySpec::Custom {
                times,
                lower,
                upper,
            } => {
                if times.len() != lower.len() || times.len() != upper.len() || times.is_empty() {
                    return Err(Error::domain(
                        "custom boundaries need equally many times, lower and upper values",
                    ));
                }
                if times[0] != 0.0 {
                    return Err(Error::domain("custom boundary times must start at 0"));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::domain(
                        "custom boundary times must be strictly increasing",
                    ));
                }
                for (l, u) in lower.iter().zip(upper) {
                    if l.is_nan() || u.is_nan() || l > u {
                        return Err(Error::domain(
                            "custom boundaries must satisfy lower <= upper and not be NaN",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Anchor time of the family: pinch time for cusps, horizon of interest
    /// for the constant and custom kinds.
    pub fn tau(&self) -> f64 {
        match self {
            BoundarySpec::ClosingCusp { tau, .. }
            | BoundarySpec::OpeningCusp { tau, .. }
            | BoundarySpec::SymmetricCusp { tau, .. }
            | BoundarySpec::ConstantGap { tau, .. } => *tau,
            BoundarySpec::Custom { times, .. } => *times.last().unwrap(),
        }
    }

    /// The same family with its exponent replaced; the constant-gap family
    /// has no exponent and is returned unchanged.
    pub fn with_alpha(&self, alpha: f64) -> Result<BoundarySpec> {
        let spec = match self {
            BoundarySpec::ClosingCusp { tau, .. } => BoundarySpec::ClosingCusp { alpha, tau: *tau },
            BoundarySpec::OpeningCusp { tau, .. } => BoundarySpec::OpeningCusp { alpha, tau: *tau },
            BoundarySpec::SymmetricCusp { tau, .. } => {
                BoundarySpec::SymmetricCusp { alpha, tau: *tau }
            }
            BoundarySpec::ConstantGap { .. } => self.clone(),
            BoundarySpec::Custom { .. } => {
                return Err(Error::usage("custom boundaries have no exponent to sweep"))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn upper_at(&self, t: f64) -> f64 {
        match self {
            BoundarySpec::ClosingCusp { alpha, tau } => ((tau - t).max(0.0)).powf(*alpha) / 2.0,
            BoundarySpec::OpeningCusp { alpha, tau } => (t.min(*tau).max(0.0)).powf(*alpha) / 2.0,
            BoundarySpec::SymmetricCusp { alpha, tau } => (t.min(tau - t).max(0.0)).powf(*alpha),
            BoundarySpec::ConstantGap { gap, .. } => gap / 2.0,
            BoundarySpec::Custom { times, upper, .. } => upper[step_index(times, t)],
        }
    }

    pub fn lower_at(&self, t: f64) -> f64 {
        match self {
            BoundarySpec::Custom { times, lower, .. } => lower[step_index(times, t)],
            _ => -self.upper_at(t),
        }
    }

    pub fn gap_at(&self, t: f64) -> f64 {
        self.upper_at(t) - self.lower_at(t)
    }

    /// Left limit of the upper boundary. Coincides with the value for the
    /// continuous families; steps matter only for custom boundaries.
    pub fn upper_left_limit(&self, t: f64) -> f64 {
        match self {
            BoundarySpec::Custom { times, upper, .. } => upper[left_index(times, t)],
            _ => self.upper_at(t),
        }
    }

    pub fn lower_left_limit(&self, t: f64) -> f64 {
        match self {
            BoundarySpec::Custom { times, lower, .. } => lower[left_index(times, t)],
            _ => self.lower_at(t),
        }
    }

    /// Samples the family onto a grid.
    pub fn discretize(&self, grid: &std::sync::Arc<TimeGrid>) -> Result<BoundaryPair> {
        self.validate()?;
        let lower = GridPath::from_fn(std::sync::Arc::clone(grid), |t| self.lower_at(t))?;
        let upper = GridPath::from_fn(std::sync::Arc::clone(grid), |t| self.upper_at(t))?;
        BoundaryPair::new(lower, upper)
    }
}

fn step_index(times: &[f64], t: f64) -> usize {
    match times.partition_point(|&p| p <= t) {
        0 => 0,
        k => k - 1,
    }
}

fn left_index(times: &[f64], t: f64) -> usize {
    match times.partition_point(|&p| p < t) {
        0 => 0,
        k => k - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_cusp_pinches_at_both_ends() {
        let spec = BoundarySpec::SymmetricCusp {
            alpha: 1.5,
            tau: 1.0,
        };
        assert_eq!(spec.gap_at(0.0), 0.0);
        assert_eq!(spec.gap_at(1.0), 0.0);
        assert!(spec.gap_at(0.5) > 0.0);
        let grid = TimeGrid::uniform(16, 1.0).unwrap();
        let bounds = spec.discretize(&grid).unwrap();
        assert_eq!(bounds.min_gap(), 0.0);
    }

    #[test]
    fn closing_cusp_gap_is_nonincreasing() {
        let spec = BoundarySpec::ClosingCusp {
            alpha: 1.0,
            tau: 1.0,
        };
        let mut prev = f64::INFINITY;
        for k in 0..=32 {
            let gap = spec.gap_at(k as f64 / 32.0);
            assert!(gap <= prev);
            prev = gap;
        }
        assert_eq!(spec.gap_at(1.0), 0.0);
    }

    #[test]
    fn with_alpha_sweeps_the_exponent() {
        let spec = BoundarySpec::SymmetricCusp {
            alpha: 1.0,
            tau: 2.0,
        };
        let swept = spec.with_alpha(0.5).unwrap();
        assert_eq!(swept.upper_at(1.0), 1.0f64.powf(0.5));
        assert!(spec.with_alpha(-1.0).is_err());
        let gap = BoundarySpec::ConstantGap { gap: 1.0, tau: 1.0 };
        assert_eq!(gap.with_alpha(0.5).unwrap(), gap);
    }

    #[test]
    fn custom_steps_have_left_limits() {
        let spec = BoundarySpec::Custom {
            times: vec![0.0, 1.0],
            lower: vec![0.0, -1.0],
            upper: vec![1.0, 2.0],
        };
        spec.validate().unwrap();
        assert_eq!(spec.upper_at(1.0), 2.0);
        assert_eq!(spec.upper_left_limit(1.0), 1.0);
        assert_eq!(spec.lower_left_limit(1.0), 0.0);
    }

    #[test]
    fn serde_round_trip_uses_kind_tags() {
        let spec = BoundarySpec::SymmetricCusp {
            alpha: 0.5,
            tau: 1.0,
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"symmetric_cusp\""));
        let back: BoundarySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
