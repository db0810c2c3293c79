use serde::{Deserialize, Serialize};

use crate::problem::BoxSet;
use crate::{Error, Result};

/// Step size as a function of the 1-based period counter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StepSchedule {
    /// `η_t = scale / √t`
    InverseSqrt { scale: f64 },
    Constant { eta: f64 },
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule::InverseSqrt { scale: 1.0 }
    }
}

impl StepSchedule {
    pub fn eta(&self, t: usize) -> f64 {
        match *self {
            StepSchedule::InverseSqrt { scale } => scale / (t.max(1) as f64).sqrt(),
            StepSchedule::Constant { eta } => eta,
        }
    }
}

/// Projected online gradient descent over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct OgdState {
    set: BoxSet,
    iterate: Vec<f64>,
    schedule: StepSchedule,
    t: usize,
}

impl OgdState {
    /// Starts at the box midpoint.
    pub fn new(set: BoxSet, schedule: StepSchedule) -> Self {
        let iterate = set.midpoint();
        OgdState {
            set,
            iterate,
            schedule,
            t: 1,
        }
    }

    pub fn with_start(set: BoxSet, schedule: StepSchedule, start: Vec<f64>) -> Result<Self> {
        if !set.contains(&start, 0.0) {
            return Err(Error::config("OGD start point lies outside the box"));
        }
        Ok(OgdState {
            set,
            iterate: start,
            schedule,
            t: 1,
        })
    }

    pub fn iterate(&self) -> &[f64] {
        &self.iterate
    }

    /// Current 1-based period counter.
    pub fn period(&self) -> usize {
        self.t
    }

    pub fn set(&self) -> &BoxSet {
        &self.set
    }

    pub fn update(&mut self, subgradient: &[f64]) -> Result<()> {
        if subgradient.len() != self.iterate.len() {
            return Err(Error::config("subgradient dimension differs from the box"));
        }
        if subgradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { what: "OGD subgradient" });
        }
        let eta = self.schedule.eta(self.t);
        for (c, g) in self.iterate.iter_mut().zip(subgradient) {
            *c -= eta * g;
        }
        self.set.project(&mut self.iterate);
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_step(start: f64) -> OgdState {
        OgdState::with_start(
            BoxSet::interval(0.0, 10.0).unwrap(),
            StepSchedule::Constant { eta: 1.0 },
            vec![start],
        )
        .unwrap()
    }

    #[test]
    fn interior_step() {
        let mut s = unit_step(5.0);
        s.update(&[2.0]).unwrap();
        assert_eq!(s.iterate(), &[3.0]);
        assert_eq!(s.period(), 2);
    }

    #[test]
    fn projects_onto_boundary() {
        let mut s = unit_step(0.5);
        s.update(&[2.0]).unwrap();
        assert_eq!(s.iterate(), &[0.0]);
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut s = unit_step(4.25);
        s.update(&[0.0]).unwrap();
        assert_eq!(s.iterate(), &[4.25]);
    }

    #[test]
    fn rejects_non_finite() {
        let mut s = unit_step(1.0);
        assert!(s.update(&[f64::NAN]).is_err());
    }

    #[test]
    fn default_schedule_and_start() {
        let s = OgdState::new(BoxSet::interval(2.0, 6.0).unwrap(), StepSchedule::default());
        assert_eq!(s.iterate(), &[4.0]);
        assert_eq!(StepSchedule::default().eta(4), 0.5);
    }
}
