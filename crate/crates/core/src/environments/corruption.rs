use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::EnvironmentSchedule;
use crate::problem::{TypeRealization, WeightedType};
use crate::rng::{stream, Purpose};
use crate::solvers::SampleGroup;
use crate::{Error, Result};

/// How a corrupted period's type is rewritten.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorruptionRule {
    /// Multiply every coordinate.
    Scale { factor: f64 },
    /// Replace the whole type.
    Replace { theta: Vec<f64> },
    /// Add a constant to every coordinate, clamping at zero.
    MeanShift { shift: f64 },
}

impl CorruptionRule {
    pub fn apply(&self, theta: &TypeRealization) -> TypeRealization {
        match self {
            CorruptionRule::Scale { factor } => TypeRealization(theta.0.iter().map(|v| v * factor).collect()),
            CorruptionRule::Replace { theta } => TypeRealization(theta.clone()),
            CorruptionRule::MeanShift { shift } => TypeRealization(theta.0.iter().map(|v| (v + shift).max(0.0)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "select", rename_all = "snake_case", deny_unknown_fields)]
pub enum PeriodSelection {
    /// 1-based periods.
    Explicit { periods: Vec<usize> },
    /// `count` distinct periods drawn uniformly from the corruption stream.
    Random { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionPlan {
    pub periods: PeriodSelection,
    pub rule: CorruptionRule,
}

impl CorruptionPlan {
    pub fn none() -> Self {
        CorruptionPlan {
            periods: PeriodSelection::Explicit { periods: Vec::new() },
            rule: CorruptionRule::Scale { factor: 1.0 },
        }
    }

    /// Sorted, deduplicated 1-based periods for a run.
    pub fn resolve(&self, horizon: usize, seed: u64) -> Result<Vec<usize>> {
        let mut out = match &self.periods {
            PeriodSelection::Explicit { periods } => {
                if let Some(bad) = periods.iter().find(|p| **p == 0 || **p > horizon) {
                    return Err(Error::config(format!("corrupted period {bad} outside 1..={horizon}")));
                }
                periods.clone()
            }
            PeriodSelection::Random { count } => {
                if *count > horizon {
                    return Err(Error::config("more corrupted periods than the horizon"));
                }
                let mut rng = stream(seed, Purpose::Corruption);
                sample(&mut rng, horizon, *count).into_iter().map(|i| i + 1).collect()
            }
        };
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// Clean and observed horizons of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptedHorizon {
    pub clean: Vec<TypeRealization>,
    pub observed: Vec<TypeRealization>,
    /// Periods whose observed type differs from the clean one.
    pub corrupted: Vec<bool>,
    /// Number of `true` entries in `corrupted`.
    pub w: usize,
}

pub fn apply_corruption(
    realizations: Vec<TypeRealization>,
    plan: &CorruptionPlan,
    seed: u64,
) -> Result<CorruptedHorizon> {
    let periods = plan.resolve(realizations.len(), seed)?;
    let mut observed = realizations.clone();
    for p in &periods {
        observed[p - 1] = plan.rule.apply(&realizations[p - 1]);
    }
    let corrupted: Vec<bool> = realizations.iter().zip(&observed).map(|(a, b)| a != b).collect();
    let w = corrupted.iter().filter(|c| **c).count();
    Ok(CorruptedHorizon {
        clean: realizations,
        observed,
        corrupted,
        w,
    })
}

/// SAA groups for the laws a run actually faces: per segment, one group of
/// clean periods and one of corrupted periods.
pub fn corrupted_groups(
    schedule: &EnvironmentSchedule,
    plan: &CorruptionPlan,
    seed: u64,
    n_samples: usize,
    saa_seed: u64,
) -> Result<Vec<SampleGroup>> {
    let periods = plan.resolve(schedule.horizon(), seed)?;
    let mut hit = vec![0usize; schedule.segments().len()];
    for p in &periods {
        hit[schedule.segment_of(*p)] += 1;
    }
    let mut groups = Vec::new();
    for (i, seg) in schedule.segments().iter().enumerate() {
        let mut rng = stream(saa_seed, Purpose::Saa(i as u32));
        let clean = seg.len() - hit[i];
        if clean > 0 {
            groups.push(SampleGroup {
                periods: clean,
                samples: seg.distribution.saa(n_samples, &mut rng),
            });
        }
        if hit[i] > 0 {
            // corrupted law = the rule applied to clean draws
            let mut rng = stream(saa_seed, Purpose::Saa((schedule.segments().len() + i) as u32));
            let samples = seg
                .distribution
                .saa(n_samples, &mut rng)
                .into_iter()
                .map(|s| WeightedType {
                    theta: plan.rule.apply(&s.theta),
                    weight: s.weight,
                })
                .collect();
            groups.push(SampleGroup {
                periods: hit[i],
                samples,
            });
        }
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn horizon(t: usize) -> Vec<TypeRealization> {
        (0..t).map(|i| TypeRealization(vec![1.0 + i as f64])).collect()
    }

    #[test]
    fn empty_plan_is_identity() {
        let out = apply_corruption(horizon(5), &CorruptionPlan::none(), 0).unwrap();
        assert_eq!(out.w, 0);
        assert_eq!(out.clean, out.observed);
    }

    #[test]
    fn scaling_first_k_counts_k() {
        let plan = CorruptionPlan {
            periods: PeriodSelection::Explicit { periods: vec![1, 2, 3] },
            rule: CorruptionRule::Scale { factor: 2.0 },
        };
        let out = apply_corruption(horizon(6), &plan, 0).unwrap();
        assert_eq!(out.w, 3);
        assert_eq!(out.observed[0].0, vec![2.0]);
        assert_eq!(out.observed[3].0, vec![4.0]);
    }

    #[test]
    fn no_op_rewrites_are_not_counted() {
        let plan = CorruptionPlan {
            periods: PeriodSelection::Explicit { periods: vec![1, 2] },
            rule: CorruptionRule::Replace { theta: vec![2.0] },
        };
        // period 2 already equals the replacement
        assert_eq!(apply_corruption(horizon(3), &plan, 0).unwrap().w, 1);
    }

    #[test]
    fn random_selection_is_seeded_and_distinct() {
        let plan = CorruptionPlan {
            periods: PeriodSelection::Random { count: 40 },
            rule: CorruptionRule::MeanShift { shift: 1.0 },
        };
        let a = plan.resolve(100, 3).unwrap();
        assert_eq!(a.len(), 40);
        assert_eq!(a, plan.resolve(100, 3).unwrap());
        assert!(a.iter().all(|p| (1..=100).contains(p)));
    }

    #[test]
    fn rejects_out_of_range() {
        let plan = CorruptionPlan {
            periods: PeriodSelection::Explicit { periods: vec![0] },
            rule: CorruptionRule::Scale { factor: 0.0 },
        };
        assert!(plan.resolve(5, 0).is_err());
    }

    #[test]
    fn plan_round_trips_through_json() {
        let json = r#"{"periods":{"select":"random","count":5},"rule":{"rule":"mean_shift","shift":-10.0}}"#;
        let plan: CorruptionPlan = serde_json::from_str(json).unwrap();
        assert_eq!(plan.rule, CorruptionRule::MeanShift { shift: -10.0 });
    }
}
