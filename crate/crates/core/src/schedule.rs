//! Learning-rate schedules: the forgetting-factor recursion
//! `r(k) = alpha * r(k-1) + 1`, `eta(k) = 1 / r(k)`, and the per-win-count
//! rate `eta = 1 / k_j`.

use crate::error::{Error, Result};

/// Whether the rate recursion is shared across neurons or each neuron decays
/// with its own win count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    Shared,
    PerNeuron,
}

impl std::fmt::Display for RateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RateMode::Shared => "shared",
            RateMode::PerNeuron => "per_neuron",
        })
    }
}

impl std::str::FromStr for RateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared" => Ok(RateMode::Shared),
            "per_neuron" => Ok(RateMode::PerNeuron),
            other => Err(Error::InvalidParameter {
                name: "rate_mode",
                message: format!("expected shared or per_neuron, got {other:?}"),
            }),
        }
    }
}

/// State of the shared learning-rate recursion.
///
/// With `alpha = 1` the rate reduces to the harmonic sequence `1/k`; with
/// `alpha < 1` it converges to `1 - alpha`, which lets prototypes track
/// drifting data.
#[derive(Debug, Clone, PartialEq)]
pub struct RateState {
    r: f64,
    alpha: f64,
    steps: u64,
}

impl RateState {
    /// Starts the recursion at `r = 0`, so the first step yields a full
    /// rate of exactly one.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                message: format!("forgetting factor must lie in [0, 1], got {alpha}"),
            });
        }
        Ok(RateState {
            r: 0.0,
            alpha,
            steps: 0,
        })
    }

    /// Advances the recursion and returns the new rate `eta = 1 / r`.
    pub fn step(&mut self) -> f64 {
        self.r = self.alpha * self.r + 1.0;
        self.steps += 1;
        1.0 / self.r
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Rate that the last call to [`RateState::step`] produced, if any.
    pub fn current_eta(&self) -> Option<f64> {
        if self.steps == 0 {
            None
        } else {
            Some(1.0 / self.r)
        }
    }
}

/// Per-neuron rate `1 / k_j` keyed on that neuron's win count.
pub fn win_count_rate(k_j: u64) -> Result<f64> {
    if k_j == 0 {
        return Err(Error::InvalidParameter {
            name: "k_j",
            message: "win count must be at least 1".into(),
        });
    }
    Ok(1.0 / k_j as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn alpha_one_gives_harmonic_sequence() {
        let mut s = RateState::new(1.0).unwrap();
        for k in 1..=100u64 {
            let eta = s.step();
            assert_eq!(eta, 1.0 / k as f64);
        }
    }

    #[test]
    fn alpha_zero_gives_constant_one() {
        let mut s = RateState::new(0.0).unwrap();
        for _ in 0..50 {
            assert_eq!(s.step(), 1.0);
        }
    }

    #[test]
    fn alpha_half_matches_direct_recursion() {
        let mut s = RateState::new(0.5).unwrap();
        // r = 1, 1.5, 1.75 -> eta = 1, 2/3, 4/7
        assert!((s.step() - 1.0).abs() < 1e-4);
        assert!((s.step() - 0.6667).abs() < 1e-4);
        assert!((s.step() - 0.5714).abs() < 1e-4);
    }

    #[test]
    fn alpha_is_validated() {
        assert!(RateState::new(-0.1).is_err());
        assert!(RateState::new(1.1).is_err());
        assert!(RateState::new(f64::NAN).is_err());
    }

    #[test]
    fn win_count_rate_basics() {
        assert_eq!(win_count_rate(1).unwrap(), 1.0);
        assert_eq!(win_count_rate(4).unwrap(), 0.25);
        assert_eq!(win_count_rate(1000).unwrap(), 0.001);
        assert!(win_count_rate(0).is_err());
    }

    #[test]
    fn rate_converges_to_one_minus_alpha() {
        // The geometric tail alpha^k must be negligible for the limit to be
        // visible after 1e3 steps, which bounds alpha away from 1.
        for alpha in [0.0, 0.1, 0.5, 0.9, 0.95, 0.98] {
            let mut s = RateState::new(alpha).unwrap();
            let mut eta = 1.0;
            for _ in 0..1000 {
                eta = s.step();
            }
            assert!(
                (eta - (1.0 - alpha)).abs() < 1e-9,
                "alpha={alpha} eta={eta}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rate_respects_bounds_and_monotonicity(alpha in 0.0f64..=1.0) {
            let mut s = RateState::new(alpha).unwrap();
            let mut prev = f64::INFINITY;
            for k in 1..=10_000u64 {
                let eta = s.step();
                prop_assert!(eta <= 1.0, "eta {eta} above 1 at step {k}");
                prop_assert!(eta >= 1.0 / k as f64, "eta {eta} below 1/{k}");
                prop_assert!(eta <= prev, "rate increased at step {k}");
                prev = eta;
            }
        }
    }
}
