use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::learners::hedge::sample_index;
use crate::problem::{TypeRealization, WeightedType};
use crate::{Error, Result};

/// Per-period type distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    /// Independent coordinates `max(0, N(mean_i, std_i²))`.
    ClampedNormal { mean: Vec<f64>, std: Vec<f64> },
    /// Finite support with probability weights.
    Discrete { atoms: Vec<Vec<f64>>, weights: Vec<f64> },
}

impl Distribution {
    pub fn clamped_normal(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        let d = Distribution::ClampedNormal { mean, std };
        d.validate()?;
        Ok(d)
    }

    pub fn point(atom: Vec<f64>) -> Self {
        Distribution::Discrete {
            atoms: vec![atom],
            weights: vec![1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Distribution::ClampedNormal { mean, std } => {
                if mean.is_empty() || mean.len() != std.len() {
                    return Err(Error::config("clamped normal needs matching mean and std vectors"));
                }
                if mean.iter().any(|m| !m.is_finite()) || std.iter().any(|s| !s.is_finite() || *s < 0.0) {
                    return Err(Error::config("clamped normal needs finite mean and nonnegative std"));
                }
            }
            Distribution::Discrete { atoms, weights } => {
                if atoms.is_empty() || atoms.len() != weights.len() {
                    return Err(Error::config("discrete distribution needs one weight per atom"));
                }
                let dim = atoms[0].len();
                if atoms.iter().any(|a| a.len() != dim || a.iter().any(|v| !v.is_finite())) {
                    return Err(Error::config("discrete atoms must share a finite dimension"));
                }
                if weights.iter().any(|w| w.is_nan() || *w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::config("discrete weights must be nonnegative and sum to one"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Distribution::ClampedNormal { mean, .. } => mean.len(),
            Distribution::Discrete { atoms, .. } => atoms[0].len(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TypeRealization {
        match self {
            Distribution::ClampedNormal { mean, std } => TypeRealization(
                mean.iter()
                    .zip(std)
                    .map(|(m, s)| {
                        let z: f64 = rng.sample(StandardNormal);
                        (m + s * z).max(0.0)
                    })
                    .collect(),
            ),
            Distribution::Discrete { atoms, weights } => {
                TypeRealization(atoms[sample_index(weights, rng)].clone())
            }
        }
    }

    /// Weighted samples for an SAA: `n` equally weighted draws, or the atoms
    /// themselves for a discrete law. Degenerate normals collapse to one atom.
    pub fn saa<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<WeightedType> {
        match self {
            Distribution::Discrete { atoms, weights } => atoms
                .iter()
                .zip(weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(a, w)| WeightedType {
                    theta: TypeRealization(a.clone()),
                    weight: *w,
                })
                .collect(),
            Distribution::ClampedNormal { mean, std } if std.iter().all(|s| *s == 0.0) => {
                vec![WeightedType {
                    theta: TypeRealization(mean.iter().map(|m| m.max(0.0)).collect()),
                    weight: 1.0,
                }]
            }
            _ => {
                let n = n.max(1);
                (0..n)
                    .map(|_| WeightedType {
                        theta: self.sample(rng),
                        weight: 1.0 / n as f64,
                    })
                    .collect()
            }
        }
    }

    /// Coordinate-wise expectation.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            Distribution::ClampedNormal { mean, std } => {
                mean.iter().zip(std).map(|(m, s)| clamped_normal_mean(*m, *s)).collect()
            }
            Distribution::Discrete { atoms, weights } => {
                let mut out = vec![0.0; atoms[0].len()];
                for (a, w) in atoms.iter().zip(weights) {
                    for (o, v) in out.iter_mut().zip(a) {
                        *o += w * v;
                    }
                }
                out
            }
        }
    }

    /// The atom of a one-point law, if this is one.
    pub fn as_point(&self) -> Option<&[f64]> {
        match self {
            Distribution::Discrete { atoms, weights } => {
                let live: Vec<usize> = (0..atoms.len()).filter(|&i| weights[i] > 0.0).collect();
                (live.len() == 1).then(|| atoms[live[0]].as_slice())
            }
            Distribution::ClampedNormal { .. } => None,
        }
    }
}

/// `E[max(0, N(μ, σ²))] = μ Φ(μ/σ) + σ φ(μ/σ)`.
pub fn clamped_normal_mean(mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return mu.max(0.0);
    }
    let z = mu / sigma;
    let cdf = 0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2));
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    mu * cdf + sigma * pdf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn degenerate_normal_returns_mean() {
        let d = Distribution::clamped_normal(vec![3.0, 0.5], vec![0.0, 0.0]).unwrap();
        let mut rng = stream(1, Purpose::Demand);
        for _ in 0..10 {
            assert_eq!(d.sample(&mut rng).0, vec![3.0, 0.5]);
        }
    }

    #[test]
    fn clamped_mean_values() {
        assert_eq!(clamped_normal_mean(-1.0, 0.0), 0.0);
        // standard normal: E[max(0, Z)] = 1/√(2π)
        assert!((clamped_normal_mean(0.0, 1.0) - 0.398_942_280_4).abs() < 1e-9);
        // far from zero the clamp is negligible
        assert!((clamped_normal_mean(10.0, 10.0 / 3.0) - 10.0).abs() < 1e-2);
    }

    #[test]
    fn discrete_saa_is_exact() {
        let d = Distribution::Discrete {
            atoms: vec![vec![0.0], vec![2.0]],
            weights: vec![0.25, 0.75],
        };
        let s = d.saa(1000, &mut stream(0, Purpose::Saa(0)));
        assert_eq!(s.len(), 2);
        assert_eq!(d.mean(), vec![1.5]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Distribution::clamped_normal(vec![1.0], vec![-1.0]).is_err());
        assert!(Distribution::Discrete {
            atoms: vec![vec![1.0]],
            weights: vec![0.5]
        }
        .validate()
        .is_err());
    }
}
