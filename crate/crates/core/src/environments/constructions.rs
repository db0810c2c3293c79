//! Two-scenario instances where the second half of the horizon departs from
//! the first in one of two directions that no policy can tell apart before
//! the midpoint.
//!
//! One decision `x ∈ [0, 1]` per period, cost `θ x`, capacity `Σ x ≤ T/2`.
//! The nominal type is `θ = −1`. In the second half the realized type is
//! `−(1 + w)` in the "up" scenario and `−(1 − w)` in the "down" scenario,
//! with `w = magnitude / T`. Spending `y` units of capacity before the
//! midpoint costs `w y` against the offline optimum in the up scenario and
//! `w (T/2 − y)` in the down scenario, so some scenario charges at least
//! `magnitude / 4`.

use super::{CorruptionPlan, CorruptionRule, Distribution, EnvironmentSchedule, PeriodSelection, Segment};
use crate::problem::LinearBoxFamily;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundScenario {
    pub name: &'static str,
    pub family: LinearBoxFamily,
    /// Realized law: nominal first half, shifted second half.
    pub truth: EnvironmentSchedule,
    /// Nominal law on the whole horizon.
    pub nominal: EnvironmentSchedule,
    /// Second-half type.
    pub shifted_type: f64,
    /// Offline optimum in raw units.
    pub offline_opt: f64,
}

impl LowerBoundScenario {
    /// Corruption that turns the nominal horizon into the realized one.
    pub fn corruption_plan(&self) -> CorruptionPlan {
        let t = self.truth.horizon();
        CorruptionPlan {
            periods: PeriodSelection::Explicit {
                periods: (t / 2 + 1..=t).collect(),
            },
            rule: CorruptionRule::Replace {
                theta: vec![self.shifted_type],
            },
        }
    }
}

pub fn shifted_second_half(horizon: usize, magnitude: f64) -> Result<[LowerBoundScenario; 2]> {
    if horizon < 2 || !horizon.is_multiple_of(2) {
        return Err(Error::config("the construction needs an even horizon"));
    }
    let t = horizon as f64;
    let w = magnitude / t;
    if !(0.0..1.0).contains(&w) {
        return Err(Error::config("magnitude must lie in [0, T)"));
    }
    let family = LinearBoxFamily::scalar(0.5, 1.0 + w)?;
    let half = horizon / 2;
    let nominal = EnvironmentSchedule::stationary(horizon, Distribution::point(vec![-1.0]))?;
    let build = |name, theta: f64, offline_opt| -> Result<LowerBoundScenario> {
        let truth = EnvironmentSchedule::new(vec![
            Segment {
                start: 1,
                end: half,
                distribution: Distribution::point(vec![-1.0]),
            },
            Segment {
                start: half + 1,
                end: horizon,
                distribution: Distribution::point(vec![theta]),
            },
        ])?;
        Ok(LowerBoundScenario {
            name,
            family: family.clone(),
            truth,
            nominal: nominal.clone(),
            shifted_type: theta,
            offline_opt,
        })
    };
    Ok([
        build("up", -(1.0 + w), -(1.0 + w) * t / 2.0)?,
        build("down", -(1.0 - w), -t / 2.0)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offline_optima() {
        let [up, down] = shifted_second_half(100, 20.0).unwrap();
        assert!((up.offline_opt + 60.0).abs() < 1e-12);
        assert!((down.offline_opt + 50.0).abs() < 1e-12);
        assert_eq!(up.corruption_plan().resolve(100, 0).unwrap().len(), 50);
    }

    #[test]
    fn every_split_loses_a_quarter_of_the_magnitude() {
        let (t, mag) = (100.0, 20.0);
        let w = mag / t;
        for k in 0..=50 {
            let y = k as f64;
            let up = w * y;
            let down = w * (t / 2.0 - y);
            assert!(up.max(down) >= mag / 4.0 - 1e-12);
        }
    }
}
