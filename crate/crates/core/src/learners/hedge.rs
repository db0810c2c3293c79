use rand::Rng;

use crate::{Error, Result};

/// Exponential weights over `m` experts, stored as log-weights.
///
/// Rewards are maximized: `log w_i += ε · l_i / δ`. Feedback outside
/// `[-δ, δ]` is clipped and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeState {
    log_weights: Vec<f64>,
    epsilon: f64,
    delta: f64,
    t: usize,
    clipped: usize,
}

impl HedgeState {
    pub fn new(m: usize, epsilon: f64, delta: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("Hedge needs at least one expert"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) || !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::config("Hedge needs positive finite epsilon and delta"));
        }
        Ok(HedgeState {
            log_weights: vec![0.0; m],
            epsilon,
            delta,
            t: 1,
            clipped: 0,
        })
    }

    /// `ε = √(ln m / T)`; for `m = 1` the rate is irrelevant and set to one.
    pub fn default_epsilon(m: usize, horizon: usize) -> f64 {
        if m <= 1 {
            1.0
        } else {
            ((m as f64).ln() / horizon.max(1) as f64).sqrt()
        }
    }

    pub fn from_log_weights(log_weights: Vec<f64>, epsilon: f64, delta: f64) -> Result<Self> {
        let mut s = HedgeState::new(log_weights.len(), epsilon, delta)?;
        if log_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite { what: "Hedge log-weights" });
        }
        s.log_weights = log_weights;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn period(&self) -> usize {
        self.t
    }

    /// Number of feedback entries clipped to `±δ` so far.
    pub fn clipped(&self) -> usize {
        self.clipped
    }

    pub fn distribution(&self) -> Vec<f64> {
        let top = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }

    /// Expert with the largest weight, lowest index on ties.
    pub fn leader(&self) -> usize {
        let mut best = 0;
        for (i, w) in self.log_weights.iter().enumerate() {
            if *w > self.log_weights[best] {
                best = i;
            }
        }
        best
    }

    /// Draws a 0-based expert index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.distribution(), rng)
    }

    pub fn update(&mut self, rewards: &[f64]) -> Result<()> {
        if rewards.len() != self.log_weights.len() {
            return Err(Error::config("reward vector has the wrong dimension"));
        }
        if rewards.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite { what: "Hedge rewards" });
        }
        for (w, r) in self.log_weights.iter_mut().zip(rewards) {
            let clipped = r.clamp(-self.delta, self.delta);
            if clipped != *r {
                self.clipped += 1;
            }
            *w += self.epsilon * clipped / self.delta;
        }
        // keep the log-weights anchored near zero
        let top = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top.abs() > 1e6 {
            self.log_weights.iter_mut().for_each(|w| *w -= top);
        }
        self.t += 1;
        Ok(())
    }
}

/// Inverse-CDF draw from a probability vector.
pub(crate) fn sample_index<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn fresh_state_is_uniform() {
        let h = HedgeState::new(3, 0.1, 1.0).unwrap();
        for p in h.distribution() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let mut rng = stream(1, Purpose::Dual);
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            counts[h.sample(&mut rng)] += 1;
        }
        for c in counts {
            assert!((c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn softmax_of_log_nine() {
        let h = HedgeState::from_log_weights(vec![9f64.ln(), 0.0], 0.1, 1.0).unwrap();
        assert!((h.distribution()[0] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn singleton_always_returns_first() {
        let h = HedgeState::new(1, 1.0, 1.0).unwrap();
        let mut rng = stream(3, Purpose::Dual);
        assert!((0..100).all(|_| h.sample(&mut rng) == 0));
    }

    #[test]
    fn one_update() {
        let mut h = HedgeState::new(2, 0.5, 1.0).unwrap();
        h.update(&[1.0, 0.0]).unwrap();
        assert_eq!(h.log_weights(), &[0.5, 0.0]);
        let y = h.distribution();
        assert!((y[0] - 0.622_459_331_2).abs() < 1e-9);
        assert!((y[1] - 0.377_540_668_8).abs() < 1e-9);
    }

    #[test]
    fn zero_rewards_change_only_the_counter() {
        let mut h = HedgeState::new(2, 0.5, 1.0).unwrap();
        h.update(&[0.0, 0.0]).unwrap();
        assert_eq!(h.log_weights(), &[0.0, 0.0]);
        assert_eq!(h.period(), 2);
    }

    #[test]
    fn clips_large_feedback() {
        let mut h = HedgeState::new(2, 1.0, 2.0).unwrap();
        h.update(&[5.0, -1.0]).unwrap();
        assert_eq!(h.log_weights(), &[1.0, -0.5]);
        assert_eq!(h.clipped(), 1);
    }

    #[test]
    fn leader_breaks_ties_low() {
        let h = HedgeState::from_log_weights(vec![0.0, 1.0, 1.0], 0.1, 1.0).unwrap();
        assert_eq!(h.leader(), 1);
    }
}
