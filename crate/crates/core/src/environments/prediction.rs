use serde::{Deserialize, Serialize};

use super::distribution::clamped_normal_mean;
use super::{Distribution, EnvironmentSchedule};
use crate::problem::{TwoStageFamily, TypeRealization};
use crate::{Error, Result};

/// Predicted per-period distributions, with an optional user-declared total
/// inaccuracy for pairs the closed forms do not cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionSchedule {
    pub schedule: EnvironmentSchedule,
    #[serde(default)]
    pub declared_inaccuracy: Option<f64>,
}

impl PredictionSchedule {
    pub fn exact(schedule: &EnvironmentSchedule) -> Self {
        PredictionSchedule {
            schedule: schedule.clone(),
            declared_inaccuracy: None,
        }
    }

    /// Every location parameter moved by `shift` (before clamping).
    pub fn shifted(schedule: &EnvironmentSchedule, shift: f64) -> Result<Self> {
        let schedule = schedule.map_distributions(|d| {
            Ok(match d {
                Distribution::ClampedNormal { mean, std } => Distribution::clamped_normal(
                    mean.iter().map(|m| m + shift).collect(),
                    std.clone(),
                )?,
                Distribution::Discrete { atoms, weights } => Distribution::Discrete {
                    atoms: atoms
                        .iter()
                        .map(|a| a.iter().map(|v| (v + shift).max(0.0)).collect())
                        .collect(),
                    weights: weights.clone(),
                },
            })
        })?;
        Ok(PredictionSchedule {
            schedule,
            declared_inaccuracy: None,
        })
    }

    /// `W_T`: the declared value when present, otherwise the closed form.
    pub fn inaccuracy<F: TwoStageFamily + ?Sized>(&self, family: &F, truth: &EnvironmentSchedule) -> Result<f64> {
        match self.declared_inaccuracy {
            Some(w) => Ok(w),
            None => prediction_inaccuracy(family, truth, &self.schedule),
        }
    }
}

/// Transport distance between two per-period laws in normalized units.
///
/// Point masses use the family's type metric. Clamped normals with equal
/// deviations are coupled quantile by quantile, under which every
/// coordinate's displacement keeps one sign; the result is the largest
/// per-coordinate mean displacement, scaled by the family's sup-norm
/// Lipschitz constant.
pub fn period_inaccuracy<F: TwoStageFamily + ?Sized>(family: &F, truth: &Distribution, predicted: &Distribution) -> Result<f64> {
    if truth == predicted {
        return Ok(0.0);
    }
    if let (Some(a), Some(b)) = (truth.as_point(), predicted.as_point()) {
        return family
            .type_distance(&TypeRealization(a.to_vec()), &TypeRealization(b.to_vec()))
            .ok_or_else(|| Error::UnsupportedMetric("point masses under a family without a type metric".into()));
    }
    match (truth, predicted) {
        (Distribution::ClampedNormal { mean: a, std: sa }, Distribution::ClampedNormal { mean: b, std: sb })
            if sa == sb && a.len() == b.len() =>
        {
            let l = family
                .sup_norm_lipschitz()
                .ok_or_else(|| Error::UnsupportedMetric("clamped normals under a non sup-norm metric".into()))?;
            let shift = a
                .iter()
                .zip(b)
                .zip(sa)
                .map(|((x, y), s)| (clamped_normal_mean(*x, *s) - clamped_normal_mean(*y, *s)).abs())
                .fold(0.0, f64::max);
            Ok(l * shift)
        }
        _ => Err(Error::UnsupportedMetric(
            "distribution pair without a closed-form coupling".into(),
        )),
    }
}

/// `W_T = Σ_t W(P̂_t, P_t)` over the common horizon.
pub fn prediction_inaccuracy<F: TwoStageFamily + ?Sized>(
    family: &F,
    truth: &EnvironmentSchedule,
    predictions: &EnvironmentSchedule,
) -> Result<f64> {
    if truth.horizon() != predictions.horizon() {
        return Err(Error::config("predictions must span the same horizon"));
    }
    let (a, b) = (truth.segments(), predictions.segments());
    let (mut i, mut j, mut t) = (0, 0, 1);
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let end = a[i].end.min(b[j].end);
        total += (end + 1 - t) as f64 * period_inaccuracy(family, &a[i].distribution, &b[j].distribution)?;
        t = end + 1;
        if a[i].end == end {
            i += 1;
        }
        if b[j].end == end {
            j += 1;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ConstraintDirection, ResourceAllocation};

    fn family() -> ResourceAllocation {
        ResourceAllocation::new(vec![0.5, 0.5], 10.0, 10.0, ConstraintDirection::Packing).unwrap()
    }

    #[test]
    fn identical_schedules_have_zero_inaccuracy() {
        let s = EnvironmentSchedule::from_pattern(100, &[1.0, 3.0], 5.0, 2.0, 2).unwrap();
        assert_eq!(prediction_inaccuracy(&family(), &s, &s).unwrap(), 0.0);
    }

    #[test]
    fn large_location_shift_is_nearly_exact() {
        let s = EnvironmentSchedule::from_pattern(100, &[4.0], 5.0, 1.0, 2).unwrap();
        let p = PredictionSchedule::shifted(&s, 2.0).unwrap();
        let w = p.inaccuracy(&family(), &s).unwrap();
        // 100 periods × 2 / g_max
        assert!((w - 20.0).abs() < 1e-9);
    }

    #[test]
    fn additive_over_misaligned_segments() {
        let truth = EnvironmentSchedule::from_pattern(10, &[2.0, 4.0], 5.0, 0.0, 2).unwrap();
        let pred = EnvironmentSchedule::from_pattern(10, &[2.0, 2.0, 2.0, 2.0, 2.0], 5.0, 0.0, 2).unwrap();
        // σ = 0 gives point masses; periods 6..10 differ by 10 units
        let w = prediction_inaccuracy(&family(), &truth, &pred).unwrap();
        assert!((w - 5.0).abs() < 1e-12);
    }

    #[test]
    fn unsupported_pair() {
        let a = Distribution::clamped_normal(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let b = Distribution::clamped_normal(vec![1.0, 1.0], vec![2.0, 2.0]).unwrap();
        assert!(matches!(period_inaccuracy(&family(), &a, &b), Err(Error::UnsupportedMetric(_))));
    }
}
