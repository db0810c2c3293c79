//! Fluid (expectation) relaxation over groups of periods.
//!
//! Each group is a number of periods sharing one type distribution, given by
//! weighted samples. A group's policy is a mixture of first-stage actions
//! together with the inner-solve recourse at every sample; mixtures make the
//! relaxation convex in `c`. The program is solved by column generation: the
//! restricted master is a small LP over mixture weights, and pricing is the
//! family's exact first-stage minimization at the master's prices.
//!
//! Everything inside is normalized; `raw_value` rescales the optimum.

use crate::problem::{TwoStageFamily, WeightedType};
use crate::solvers::simplex::{LinearProgram, RowKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleGroup {
    pub periods: usize,
    pub samples: Vec<WeightedType>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidSettings {
    pub max_iterations: usize,
    /// Stop once `upper − lower ≤ tolerance · max(1, |upper|)`.
    pub tolerance: f64,
    /// Multipliers are capped at `lambda_cap · T`.
    pub lambda_cap: f64,
}

impl Default for FluidSettings {
    fn default() -> Self {
        FluidSettings {
            max_iterations: 2000,
            tolerance: 1e-9,
            lambda_cap: 10.0,
        }
    }
}

/// One group's share of the fluid optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPlan {
    /// `(weight, c)` pairs with positive weight.
    pub mixture: Vec<(f64, Vec<f64>)>,
    /// Weighted mean of the mixture.
    pub representative_c: Vec<f64>,
    /// Expected normalized consumption per period, one entry per constraint.
    pub consumption: Vec<f64>,
    /// Expected normalized cost per period.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidSolution {
    /// Normalized optimum (sum over all periods).
    pub value: f64,
    /// `value` in raw objective units.
    pub raw_value: f64,
    /// Multipliers on the `λ` scale, `λ_i = ν_i T β_i`.
    pub lambda: Vec<f64>,
    /// Prices `ν_i` on normalized consumption.
    pub prices: Vec<f64>,
    pub groups: Vec<GroupPlan>,
    pub iterations: usize,
    /// Final `upper − lower` bound gap.
    pub gap: f64,
    /// Penalized slack per constraint; positive means the cap bound.
    pub slack: Vec<f64>,
}

struct Column {
    group: usize,
    c: Vec<f64>,
    cost: f64,
    consumption: Vec<f64>,
}

fn price_group<F: TwoStageFamily + ?Sized>(
    family: &F,
    group: &SampleGroup,
    index: usize,
    prices: &[f64],
) -> Result<(Column, f64)> {
    let best = family.first_stage_argmin(&group.samples, prices)?;
    let scale = family.scale();
    let m = family.num_constraints();
    let mut cost = family.first_stage_cost(&best.c) / scale.objective;
    let mut consumption = vec![0.0; m];
    for s in &group.samples {
        let inner = family.inner_solve(&s.theta, &best.c, prices)?;
        cost += s.weight * family.second_stage_objective(&s.theta, &inner.x) / scale.objective;
        for (a, g) in consumption
            .iter_mut()
            .zip(family.constraint_values(&s.theta, &best.c, &inner.x))
        {
            *a += s.weight * g / scale.constraint;
        }
    }
    Ok((
        Column {
            group: index,
            c: best.c,
            cost,
            consumption,
        },
        best.value,
    ))
}

fn validate<F: TwoStageFamily + ?Sized>(family: &F, groups: &[SampleGroup]) -> Result<usize> {
    if groups.is_empty() {
        return Err(Error::config("fluid program needs at least one group"));
    }
    for g in groups {
        if g.samples.is_empty() {
            return Err(Error::config("every group needs at least one sample"));
        }
        let total: f64 = g.samples.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > 1e-9 || g.samples.iter().any(|s| s.weight < 0.0) {
            return Err(Error::config("sample weights must be nonnegative and sum to one"));
        }
        for s in &g.samples {
            family.validate_type(&s.theta)?;
        }
    }
    let horizon: usize = groups.iter().map(|g| g.periods).sum();
    if horizon == 0 {
        return Err(Error::config("fluid program needs a positive horizon"));
    }
    Ok(horizon)
}

/// Solves the fluid relaxation over the given groups.
pub fn fluid_opt<F: TwoStageFamily + ?Sized>(
    family: &F,
    groups: &[SampleGroup],
    settings: FluidSettings,
) -> Result<FluidSolution> {
    let horizon = validate(family, groups)?;
    let t = horizon as f64;
    let m = family.num_constraints();
    let beta = family.beta();
    let sign = family.direction().sign();
    let penalty: Vec<f64> = beta.iter().map(|b| settings.lambda_cap / b).collect();

    let mut columns: Vec<Column> = Vec::new();
    for (s, g) in groups.iter().enumerate() {
        columns.push(price_group(family, g, s, &vec![0.0; m])?.0);
    }

    let mut gap = f64::INFINITY;
    for iteration in 1..=settings.max_iterations {
        let n = columns.len();
        // variables: column weights, then one slack per constraint
        let mut objective: Vec<f64> = columns
            .iter()
            .map(|col| groups[col.group].periods as f64 * col.cost)
            .collect();
        objective.extend_from_slice(&penalty);
        let mut lp = LinearProgram::new(objective);
        for (i, b) in beta.iter().enumerate() {
            let mut row: Vec<f64> = columns
                .iter()
                .map(|col| groups[col.group].periods as f64 * col.consumption[i])
                .collect();
            row.extend((0..m).map(|j| if i == j { -sign } else { 0.0 }));
            let kind = if sign > 0.0 { RowKind::Le } else { RowKind::Ge };
            lp.add_row(row, kind, t * b);
        }
        for s in 0..groups.len() {
            let mut row: Vec<f64> = columns
                .iter()
                .map(|col| if col.group == s { 1.0 } else { 0.0 })
                .collect();
            row.extend(std::iter::repeat_n(0.0, m));
            lp.add_row(row, RowKind::Eq, 1.0);
        }
        let sol = lp.solve()?;
        let upper = sol.value;
        let prices: Vec<f64> = sol.duals[..m]
            .iter()
            .zip(&penalty)
            .map(|(y, cap)| (-sign * y).clamp(0.0, *cap))
            .collect();
        let convexity = &sol.duals[m..];

        let mut lower = -sign * prices.iter().zip(beta).map(|(p, b)| p * t * b).sum::<f64>();
        let mut fresh = Vec::new();
        for (s, g) in groups.iter().enumerate() {
            let (col, value) = price_group(family, g, s, &prices)?;
            let periods = g.periods as f64;
            lower += periods * value;
            if periods * value - convexity[s] < -1e-12 * (1.0 + convexity[s].abs())
                && !columns
                    .iter()
                    .any(|c| c.group == s && c.c == col.c && c.consumption == col.consumption)
            {
                fresh.push(col);
            }
        }
        gap = upper - lower;
        if gap <= settings.tolerance * upper.abs().max(1.0) || fresh.is_empty() {
            return finish(family, groups, &columns, &sol.x[..n], &sol.x[n..], prices, upper, iteration, gap.max(0.0));
        }
        columns.extend(fresh);
    }
    Err(Error::NoConvergence {
        what: "fluid column generation",
        iterations: settings.max_iterations,
        gap,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish<F: TwoStageFamily + ?Sized>(
    family: &F,
    groups: &[SampleGroup],
    columns: &[Column],
    weights: &[f64],
    slack: &[f64],
    prices: Vec<f64>,
    value: f64,
    iterations: usize,
    gap: f64,
) -> Result<FluidSolution> {
    let m = family.num_constraints();
    let horizon: usize = groups.iter().map(|g| g.periods).sum();
    let t = horizon as f64;
    for (i, s) in slack.iter().enumerate() {
        if *s > 1e-7 * t.max(1.0) {
            return Err(Error::FluidInfeasible {
                constraint: i + 1,
                slack: *s,
            });
        }
    }
    let dim = family.first_stage_set().dim();
    let mut plans: Vec<GroupPlan> = (0..groups.len())
        .map(|_| GroupPlan {
            mixture: Vec::new(),
            representative_c: vec![0.0; dim],
            consumption: vec![0.0; m],
            cost: 0.0,
        })
        .collect();
    for (col, &w) in columns.iter().zip(weights) {
        if w <= 0.0 {
            continue;
        }
        let plan = &mut plans[col.group];
        plan.mixture.push((w, col.c.clone()));
        for (r, c) in plan.representative_c.iter_mut().zip(&col.c) {
            *r += w * c;
        }
        for (a, v) in plan.consumption.iter_mut().zip(&col.consumption) {
            *a += w * v;
        }
        plan.cost += w * col.cost;
    }
    // renormalize against LP round-off
    for plan in &mut plans {
        let total: f64 = plan.mixture.iter().map(|(w, _)| w).sum();
        if total > 0.0 && (total - 1.0).abs() > 0.0 {
            for (w, _) in plan.mixture.iter_mut() {
                *w /= total;
            }
            plan.representative_c.iter_mut().for_each(|v| *v /= total);
            plan.consumption.iter_mut().for_each(|v| *v /= total);
            plan.cost /= total;
        }
    }
    let lambda = prices
        .iter()
        .zip(family.beta())
        .map(|(p, b)| p * t * b)
        .collect();
    Ok(FluidSolution {
        value,
        raw_value: value * family.scale().objective,
        lambda,
        prices,
        groups: plans,
        iterations,
        gap,
        slack: slack.to_vec(),
    })
}
