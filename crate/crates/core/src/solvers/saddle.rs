//! Prediction-informed saddle point.
//!
//! The saddle problem over predicted groups has the same value as their
//! fluid relaxation, so the fluid solver's prices give `λ̂*` and its group
//! mixtures give the per-period consumption targets `β̂`.

use crate::problem::{FirstStageMin, TwoStageFamily};
use crate::solvers::fluid::{fluid_opt, FluidSettings, GroupPlan, SampleGroup};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    pub lambda_star: Vec<f64>,
    /// Per group: the optimal first-stage mixture and its mean.
    pub groups: Vec<GroupPlan>,
    /// Normalized saddle value over the whole horizon.
    pub saddle_value: f64,
    pub iterations: usize,
    pub gap: f64,
}

impl SaddleSolution {
    /// `β̂_{i,s}`: normalized expected consumption per period of group `s`.
    pub fn beta_hat(&self, group: usize) -> &[f64] {
        &self.groups[group].consumption
    }

    /// `ĉ*` of a group, the mixture mean.
    pub fn c_star(&self, group: usize) -> &[f64] {
        &self.groups[group].representative_c
    }

    /// The `m × T` target matrix given the group of every period.
    pub fn beta_hat_matrix(&self, period_groups: &[usize]) -> Vec<Vec<f64>> {
        let m = self.lambda_star.len();
        (0..m)
            .map(|i| period_groups.iter().map(|&s| self.groups[s].consumption[i]).collect())
            .collect()
    }

    /// `Σ_i λ̂*_i Σ_t β̂_{i,t}` against `T Σ_i β_i λ̂*_i`, as a pair.
    pub fn complementary_sums(&self, periods: &[usize], beta: &[f64]) -> (f64, f64) {
        let t: usize = periods.iter().sum();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for (i, l) in self.lambda_star.iter().enumerate() {
            let total: f64 = self
                .groups
                .iter()
                .zip(periods)
                .map(|(g, n)| *n as f64 * g.consumption[i])
                .sum();
            lhs += l * total;
            rhs += t as f64 * beta[i] * l;
        }
        (lhs, rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleSettings {
    pub max_iterations: usize,
    /// Absolute duality-gap tolerance in units of `T`.
    pub tolerance: f64,
}

impl Default for SaddleSettings {
    fn default() -> Self {
        SaddleSettings {
            max_iterations: 2000,
            tolerance: 1e-3,
        }
    }
}

pub fn saddle_solve<F: TwoStageFamily + ?Sized>(
    family: &F,
    predictions: &[SampleGroup],
    settings: SaddleSettings,
) -> Result<SaddleSolution> {
    let horizon: usize = predictions.iter().map(|g| g.periods).sum();
    let sol = fluid_opt(
        family,
        predictions,
        FluidSettings {
            max_iterations: settings.max_iterations,
            ..FluidSettings::default()
        },
    )?;
    if sol.gap > settings.tolerance * horizon as f64 {
        return Err(Error::NoConvergence {
            what: "saddle solve",
            iterations: sol.iterations,
            gap: sol.gap,
        });
    }
    Ok(SaddleSolution {
        lambda_star: sol.lambda,
        groups: sol.groups,
        saddle_value: sol.value,
        iterations: sol.iterations,
        gap: sol.gap,
    })
}

/// `argmin_c` of the group's averaged Lagrangian at `λ = mu · e_i`.
pub fn dual_vertex_argmin<F: TwoStageFamily + ?Sized>(
    family: &F,
    group: &SampleGroup,
    constraint: usize,
    mu: f64,
    horizon: usize,
) -> Result<FirstStageMin> {
    let beta = family.beta();
    let mut prices = vec![0.0; beta.len()];
    prices[constraint] = mu / (horizon as f64 * beta[constraint]);
    family.first_stage_argmin(&group.samples, &prices)
}
