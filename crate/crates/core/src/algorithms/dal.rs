use serde::{Deserialize, Serialize};

use super::{null_record, record, Horizon, RunTrace};
use crate::learners::{Exp3State, HedgeState, OgdState, StepSchedule};
use crate::problem::{BoxSet, ConstraintDirection, TwoStageFamily, WeightedType, FEASIBILITY_TOL};
use crate::rng::{stream, Purpose};
use crate::solvers::{constraint_feedback, fluid_opt, lagrangian_at, FluidSettings, SampleGroup};
use crate::{Error, Result};

/// How the multiplier scale `μ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DalMu {
    /// `μ = T`.
    Horizon,
    Fixed { value: f64 },
    /// Run the first `⌈√T⌉` periods with `μ = T`, then set
    /// `μ = multiplier · ‖λ‖₁` from the fluid relaxation of the observed types.
    Warmup { multiplier: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DalConfig {
    /// `None`: `μ = T` for packing, a warmup estimate for covering.
    #[serde(default)]
    pub mu: Option<DalMu>,
    /// OGD steps in first-stage coordinates rescaled to the unit box.
    #[serde(default)]
    pub step: StepSchedule,
    #[serde(default)]
    pub hedge_epsilon: Option<f64>,
    /// Finite first-stage action set; switches the primal learner to EXP3.
    #[serde(default)]
    pub discrete_c: Option<Vec<Vec<f64>>>,
}

impl DalConfig {
    pub fn mu_rule(&self, direction: ConstraintDirection) -> DalMu {
        self.mu.unwrap_or(match direction {
            ConstraintDirection::Packing => DalMu::Horizon,
            ConstraintDirection::Covering => DalMu::Warmup { multiplier: 2.0 },
        })
    }
}

enum Primal {
    Ogd { ogd: OgdState, set: BoxSet },
    Exp3 { exp3: Exp3State, actions: Vec<Vec<f64>> },
}

impl Primal {
    fn propose<R: rand::Rng>(&self, rng: &mut R) -> (Vec<f64>, Option<usize>) {
        match self {
            Primal::Ogd { ogd, set } => {
                let c = ogd
                    .iterate()
                    .iter()
                    .zip(set.lo().iter().zip(set.widths()))
                    .map(|(u, (lo, w))| lo + w * u)
                    .collect();
                (c, None)
            }
            Primal::Exp3 { exp3, actions } => {
                let k = exp3.sample(rng);
                (actions[k].clone(), Some(k))
            }
        }
    }
}

fn delta(mu: f64, horizon: usize, beta: &[f64]) -> f64 {
    let beta_min = beta.iter().cloned().fold(f64::INFINITY, f64::min);
    1.0 + mu / (horizon as f64 * beta_min)
}

fn check_mu(mu: f64) -> Result<f64> {
    if mu > 0.0 && mu.is_finite() {
        Ok(mu)
    } else {
        Err(Error::config(format!("mu must be positive and finite, got {mu}")))
    }
}

/// Doubly adversarial learning: OGD (or EXP3) over first-stage actions and
/// Hedge over constraints, coupled through the per-period Lagrangian.
pub fn dal_run<F: TwoStageFamily + ?Sized>(
    family: &F,
    horizon: &Horizon,
    config: &DalConfig,
    seed: u64,
) -> Result<RunTrace> {
    let t_total = horizon.observed.len();
    if t_total == 0 {
        return Err(Error::config("empty horizon"));
    }
    for theta in horizon.observed {
        family.validate_type(theta)?;
    }
    let m = family.num_constraints();
    let direction = family.direction();
    let beta = family.beta().to_vec();
    let scale = family.scale();
    let t = t_total as f64;

    let rule = config.mu_rule(direction);
    let warmup = match rule {
        DalMu::Warmup { .. } => (t.sqrt().ceil() as usize).min(t_total),
        _ => 0,
    };
    let mut mu = check_mu(match rule {
        DalMu::Horizon | DalMu::Warmup { .. } => t,
        DalMu::Fixed { value } => value,
    })?;
    let epsilon = config
        .hedge_epsilon
        .unwrap_or_else(|| HedgeState::default_epsilon(m, t_total));
    let mut hedge = HedgeState::new(m, epsilon, delta(mu, t_total, &beta))?;

    let set = family.first_stage_set().clone();
    let mut primal = match &config.discrete_c {
        Some(actions) => {
            if actions.is_empty() || actions.iter().any(|a| !set.contains(a, FEASIBILITY_TOL)) {
                return Err(Error::config("discrete first-stage actions must be a nonempty subset of C"));
            }
            Primal::Exp3 {
                exp3: Exp3State::new(actions.len(), Exp3State::default_gamma(actions.len(), t_total))?,
                actions: actions.clone(),
            }
        }
        None => {
            let unit = BoxSet::new(vec![0.0; set.dim()], vec![1.0; set.dim()])?;
            Primal::Ogd {
                ogd: OgdState::new(unit, config.step),
                set: set.clone(),
            }
        }
    };

    let mut dual_rng = stream(seed, Purpose::Dual);
    let mut primal_rng = stream(seed, Purpose::Primal);
    let mut cum = vec![0.0; m];
    let mut records = Vec::with_capacity(t_total);
    let mut terminated_at = None;
    let mut clipped = 0;

    for period in 1..=t_total {
        let corrupted = horizon.corrupted.get(period - 1).copied().unwrap_or(false);
        if terminated_at.is_some() {
            records.push(null_record(family, period, corrupted, &cum));
            continue;
        }
        if period == warmup + 1 && warmup > 0 {
            if let DalMu::Warmup { multiplier } = rule {
                mu = warmup_mu(family, &horizon.observed[..warmup], multiplier, t_total);
                clipped += hedge.clipped();
                let log_weights = hedge.log_weights().to_vec();
                hedge = HedgeState::from_log_weights(log_weights, epsilon, delta(mu, t_total, &beta))?;
            }
        }

        let (c, arm) = primal.propose(&mut primal_rng);
        let i = hedge.sample(&mut dual_rng);
        let theta = &horizon.observed[period - 1];
        let mut lambda = vec![0.0; m];
        lambda[i] = mu;
        let point = lagrangian_at(family, theta, &c, &lambda, t_total)?;
        let x = point.inner.x.clone();

        match &mut primal {
            Primal::Ogd { ogd, set } => {
                let grad: Vec<f64> = point
                    .subgradient
                    .iter()
                    .zip(set.widths())
                    .map(|(g, w)| g * w)
                    .collect();
                ogd.update(&grad)?;
            }
            Primal::Exp3 { exp3, .. } => {
                let bound = 2.0 + mu / t + mu / (t * beta.iter().cloned().fold(f64::INFINITY, f64::min));
                let reward = ((bound - point.value) / (2.0 * bound)).clamp(0.0, 1.0);
                exp3.update(arm.expect("EXP3 proposes an arm"), reward)?;
            }
        }
        let feedback = constraint_feedback(family, theta, &c, &x, mu, t_total, None);
        hedge.update(&feedback)?;

        let rec = record(family, period, c, Some(i), corrupted, theta, x, &mut cum)?;
        records.push(rec);
        if direction == ConstraintDirection::Packing
            && cum.iter().zip(&beta).any(|(g, b)| *g > t * b * scale.constraint)
        {
            terminated_at = Some(period);
        }
    }

    Ok(RunTrace {
        algorithm: if config.discrete_c.is_some() { "DAL-EXP3" } else { "DAL" }.to_string(),
        direction,
        beta,
        capacity_scale: scale.constraint,
        records,
        terminated_at,
        mu,
        clipped: clipped + hedge.clipped(),
        w: horizon.corrupted.iter().filter(|c| **c).count(),
    })
}

/// `multiplier · ‖λ‖₁` of the fluid relaxation over the empirical law of the
/// warmup types; `T` when that program is infeasible or has zero duals.
fn warmup_mu<F: TwoStageFamily + ?Sized>(
    family: &F,
    observed: &[crate::problem::TypeRealization],
    multiplier: f64,
    horizon: usize,
) -> f64 {
    let n = observed.len() as f64;
    let group = SampleGroup {
        periods: horizon,
        samples: observed
            .iter()
            .map(|theta| WeightedType {
                theta: theta.clone(),
                weight: 1.0 / n,
            })
            .collect(),
    };
    match fluid_opt(family, &[group], FluidSettings::default()) {
        Ok(sol) => {
            let norm: f64 = sol.lambda.iter().sum();
            if norm > 0.0 {
                multiplier * norm
            } else {
                horizon as f64
            }
        }
        Err(_) => horizon as f64,
    }
}
