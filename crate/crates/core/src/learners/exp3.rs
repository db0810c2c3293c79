use rand::Rng;

use super::hedge::sample_index;
use crate::{Error, Result};

/// EXP3 over `K` arms with rewards in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3State {
    log_weights: Vec<f64>,
    gamma: f64,
    t: usize,
}

impl Exp3State {
    pub fn new(k: usize, gamma: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("EXP3 needs at least one arm"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::config("EXP3 exploration must lie in (0, 1]"));
        }
        Ok(Exp3State {
            log_weights: vec![0.0; k],
            gamma,
            t: 1,
        })
    }

    /// `γ = min(1, √(K ln K / T))`, or one for a single arm.
    pub fn default_gamma(k: usize, horizon: usize) -> f64 {
        if k <= 1 {
            return 1.0;
        }
        let kf = k as f64;
        (kf * kf.ln() / horizon.max(1) as f64).sqrt().min(1.0)
    }

    pub fn arms(&self) -> usize {
        self.log_weights.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn period(&self) -> usize {
        self.t
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let k = self.log_weights.len() as f64;
        let top = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter()
            .map(|v| (1.0 - self.gamma) * v / total + self.gamma / k)
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.probabilities(), rng)
    }

    /// Importance-weighted update of the chosen arm; the reward is clamped
    /// into `[0, 1]`.
    pub fn update(&mut self, chosen: usize, reward: f64) -> Result<()> {
        if chosen >= self.log_weights.len() {
            return Err(Error::config("chosen arm out of range"));
        }
        if !reward.is_finite() {
            return Err(Error::NonFinite { what: "EXP3 reward" });
        }
        let p = self.probabilities()[chosen];
        let estimate = reward.clamp(0.0, 1.0) / p;
        self.log_weights[chosen] += self.gamma * estimate / self.log_weights.len() as f64;
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn single_arm_is_degenerate() {
        let mut e = Exp3State::new(1, Exp3State::default_gamma(1, 100)).unwrap();
        e.update(0, 0.7).unwrap();
        assert_eq!(e.probabilities(), vec![1.0]);
        assert_eq!(e.sample(&mut stream(0, Purpose::Primal)), 0);
    }

    #[test]
    fn zero_rewards_keep_uniform() {
        let mut e = Exp3State::new(4, 0.1).unwrap();
        let mut rng = stream(9, Purpose::Primal);
        for _ in 0..500 {
            let a = e.sample(&mut rng);
            e.update(a, 0.0).unwrap();
        }
        assert!(e.probabilities().iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn distribution_stays_positive() {
        let mut e = Exp3State::new(3, 0.05).unwrap();
        for _ in 0..10_000 {
            e.update(0, 1.0).unwrap();
        }
        assert!(e.probabilities().iter().all(|p| *p >= 0.05 / 3.0 - 1e-15));
    }
}
