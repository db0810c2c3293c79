use serde::{Deserialize, Serialize};

use super::{record, Horizon, RunTrace};
use crate::environments::EnvironmentSchedule;
use crate::learners::HedgeState;
use crate::problem::TwoStageFamily;
use crate::rng::{stream, Purpose};
use crate::solvers::saddle::dual_vertex_argmin;
use crate::solvers::{constraint_feedback, inner_solve, saddle_solve, SaddleSettings, SaddleSolution, SampleGroup};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IalMu {
    /// `‖λ̂*‖₁`
    L1,
    /// `‖λ̂*‖_∞`
    LInf,
    Fixed { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IalConfig {
    #[serde(default = "default_mu")]
    pub mu: IalMu,
    #[serde(default)]
    pub hedge_epsilon: Option<f64>,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub saa_seed: u64,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_mu() -> IalMu {
    IalMu::L1
}

fn default_samples() -> usize {
    1000
}

fn default_iterations() -> usize {
    SaddleSettings::default().max_iterations
}

fn default_tolerance() -> f64 {
    SaddleSettings::default().tolerance
}

impl Default for IalConfig {
    fn default() -> Self {
        IalConfig {
            mu: default_mu(),
            hedge_epsilon: None,
            n_samples: default_samples(),
            saa_seed: 0,
            max_iterations: default_iterations(),
            tolerance: default_tolerance(),
        }
    }
}

/// Dual norms below `ZERO_NORM · T` are treated as zero.
const ZERO_NORM: f64 = 1e-9;

/// Everything IAL computes from the predictions before the first period.
#[derive(Debug, Clone, PartialEq)]
pub struct IalPlan {
    pub saddle: SaddleSolution,
    pub groups: Vec<SampleGroup>,
    /// Predicted segment of every period.
    pub period_groups: Vec<usize>,
    pub mu: f64,
    /// `c` minimizing a group's averaged Lagrangian at `λ = μ e_i`, indexed
    /// by group then constraint.
    pub vertex_actions: Vec<Vec<Vec<f64>>>,
}

impl IalPlan {
    /// `β̂_{i,t}` as an `m × T` matrix.
    pub fn beta_hat(&self) -> Vec<Vec<f64>> {
        self.saddle.beta_hat_matrix(&self.period_groups)
    }
}

pub fn ial_precompute<F: TwoStageFamily + ?Sized>(
    family: &F,
    predictions: &EnvironmentSchedule,
    config: &IalConfig,
) -> Result<IalPlan> {
    let groups = predictions.saa_groups(config.n_samples, config.saa_seed);
    let horizon = predictions.horizon();
    let saddle = saddle_solve(
        family,
        &groups,
        SaddleSettings {
            max_iterations: config.max_iterations,
            tolerance: config.tolerance,
        },
    )?;
    let mu = match config.mu {
        IalMu::Fixed { value } => value,
        IalMu::L1 => saddle.lambda_star.iter().sum(),
        IalMu::LInf => saddle.lambda_star.iter().cloned().fold(0.0, f64::max),
    };
    let mu = match config.mu {
        IalMu::Fixed { .. } if !(mu > 0.0 && mu.is_finite()) => {
            return Err(Error::config("mu must be positive and finite"));
        }
        _ if mu >= ZERO_NORM * horizon as f64 => mu,
        _ => 0.0,
    };
    let vertex_actions = groups
        .iter()
        .map(|g| {
            (0..family.num_constraints())
                .map(|i| dual_vertex_argmin(family, g, i, mu, horizon).map(|r| r.c))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IalPlan {
        saddle,
        groups,
        period_groups: predictions.period_groups(),
        mu,
        vertex_actions,
    })
}

/// Informative adversarial learning: Hedge over constraints; first-stage
/// actions minimize the predicted per-period Lagrangian at the drawn vertex.
pub fn ial_run<F: TwoStageFamily + ?Sized>(
    family: &F,
    horizon: &Horizon,
    plan: &IalPlan,
    config: &IalConfig,
    seed: u64,
) -> Result<RunTrace> {
    let t_total = horizon.observed.len();
    if t_total == 0 || plan.period_groups.len() != t_total {
        return Err(Error::config("predictions must span the realized horizon"));
    }
    for theta in horizon.observed {
        family.validate_type(theta)?;
    }
    let m = family.num_constraints();
    let beta = family.beta().to_vec();
    let mu = plan.mu;
    let epsilon = config
        .hedge_epsilon
        .unwrap_or_else(|| HedgeState::default_epsilon(m, t_total));
    let beta_min = beta.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hedge = HedgeState::new(m, epsilon, 1.0 + mu / (t_total as f64 * beta_min))?;
    let mut rng = stream(seed, Purpose::Dual);
    let mut cum = vec![0.0; m];
    let mut records = Vec::with_capacity(t_total);

    for period in 1..=t_total {
        let corrupted = horizon.corrupted.get(period - 1).copied().unwrap_or(false);
        let s = plan.period_groups[period - 1];
        let i = hedge.sample(&mut rng);
        let c = plan.vertex_actions[s][i].clone();
        let theta = &horizon.observed[period - 1];
        let mut lambda = vec![0.0; m];
        lambda[i] = mu;
        let x = inner_solve(family, theta, &c, &lambda, t_total)?.x;
        let feedback = constraint_feedback(family, theta, &c, &x, mu, t_total, Some(plan.saddle.beta_hat(s)));
        hedge.update(&feedback)?;
        records.push(record(family, period, c, Some(i), corrupted, theta, x, &mut cum)?);
    }

    Ok(RunTrace {
        algorithm: "IAL".to_string(),
        direction: family.direction(),
        beta,
        capacity_scale: family.scale().constraint,
        records,
        terminated_at: None,
        mu,
        clipped: hedge.clipped(),
        w: horizon.corrupted.iter().filter(|c| **c).count(),
    })
}
