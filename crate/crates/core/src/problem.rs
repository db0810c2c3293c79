//! Two-stage problem families.
//!
//! A family fixes the first-stage cost `p`, the second-stage objective `f`,
//! the long-term constraint functions `g`, the first-stage box `C` and the
//! recourse set `K(θ, c)`. Values returned by the raw accessors are in the
//! family's natural units; [`ScaleBounds`] maps them into the ranges the
//! learners assume (`|p + f| ≤ 1`, `g ∈ [0, 1]^m`).

use serde::{Deserialize, Serialize};

use crate::solvers::inner::{generic_inner_solve, InnerSolution};
use crate::{Error, Result};

/// Default additive tolerance for recourse feasibility, in normalized units.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintDirection {
    /// `(1/T) Σ g ≤ β`
    Packing,
    /// `(1/T) Σ g ≥ β`
    Covering,
}

impl ConstraintDirection {
    /// `+1` for packing, `-1` for covering: the sign of the multiplier term in
    /// the per-period Lagrangian.
    pub fn sign(self) -> f64 {
        match self {
            ConstraintDirection::Packing => 1.0,
            ConstraintDirection::Covering => -1.0,
        }
    }

    /// Signed violation of one averaged constraint; positive means violated.
    pub fn violation(self, average: f64, beta: f64) -> f64 {
        match self {
            ConstraintDirection::Packing => average - beta,
            ConstraintDirection::Covering => beta - average,
        }
    }
}

/// One type draw θ. For the resource family this is the demand vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeRealization(pub Vec<f64>);

impl TypeRealization {
    pub fn new(payload: Vec<f64>) -> Self {
        TypeRealization(payload)
    }

    pub fn zeros(n: usize) -> Self {
        TypeRealization(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// A type realization carrying a probability weight (SAA sample or atom).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedType {
    pub theta: TypeRealization,
    pub weight: f64,
}

/// Divisors mapping raw objective and constraint values into unit ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleBounds {
    pub objective: f64,
    pub constraint: f64,
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSet {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxSet {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::config("box bounds differ in dimension"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !l.is_finite() || !h.is_finite() || l > h) {
            return Err(Error::config("box needs finite bounds with lo <= hi"));
        }
        Ok(BoxSet { lo, hi })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        BoxSet::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, c: &[f64], tol: f64) -> bool {
        c.len() == self.dim()
            && c.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol)
    }

    pub fn project(&self, c: &mut [f64]) {
        for (v, (l, h)) in c.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *v = v.clamp(*l, *h);
        }
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.widths().iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// Normalized or raw costs of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct StageCosts {
    pub objective: f64,
    pub g: Vec<f64>,
}

/// Result of minimizing the averaged per-period Lagrangian over `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstStageMin {
    pub c: Vec<f64>,
    /// `E[p(c) + min_x {f + sign · Σ ν_i g_i}]` in normalized units,
    /// without the constant multiplier offset.
    pub value: f64,
}

/// Interface every two-stage problem family implements.
///
/// The inner problem is always posed with per-constraint prices
/// `ν_i = λ_i / (T β_i)` applied to normalized constraint values:
/// `min_{x ∈ K(θ,c)} f(θ,x)/f_max + sign · Σ_i ν_i g_i(θ,c,x)/g_max`.
pub trait TwoStageFamily: Send + Sync {
    fn num_constraints(&self) -> usize;
    fn second_stage_dim(&self) -> usize;
    fn direction(&self) -> ConstraintDirection;
    fn beta(&self) -> &[f64];
    fn first_stage_set(&self) -> &BoxSet;
    fn scale(&self) -> ScaleBounds;

    /// Raw first-stage cost `p(c)`.
    fn first_stage_cost(&self, c: &[f64]) -> f64;
    /// A subgradient of the raw first-stage cost.
    fn first_stage_cost_gradient(&self, c: &[f64]) -> Vec<f64>;
    /// Raw second-stage objective `f(θ, x)`.
    fn second_stage_objective(&self, theta: &TypeRealization, x: &[f64]) -> f64;
    /// Raw constraint values `g(θ, c, x)`.
    fn constraint_values(&self, theta: &TypeRealization, c: &[f64], x: &[f64]) -> Vec<f64>;
    /// Named residuals of the inequalities defining `K(θ, c)` in raw units;
    /// a positive residual is a violation.
    fn second_stage_residuals(
        &self,
        theta: &TypeRealization,
        c: &[f64],
        x: &[f64],
    ) -> Vec<(String, f64)>;

    fn validate_type(&self, _theta: &TypeRealization) -> Result<()> {
        Ok(())
    }

    /// Euclidean projection onto `K(θ, c)`; needed only by the generic inner
    /// solver.
    fn project_second_stage(
        &self,
        _theta: &TypeRealization,
        _c: &[f64],
        _x: &mut [f64],
    ) -> Result<()> {
        Err(Error::config("family does not provide a recourse projection"))
    }

    fn inner_solve(
        &self,
        theta: &TypeRealization,
        c: &[f64],
        prices: &[f64],
    ) -> Result<InnerSolution> {
        generic_inner_solve(self, theta, c, prices)
    }

    /// Minimizes `E_samples[p(c) + inner value]` over `C`.
    fn first_stage_argmin(&self, samples: &[WeightedType], prices: &[f64]) -> Result<FirstStageMin> {
        crate::solvers::inner::generic_first_stage_argmin(self, samples, prices)
    }

    /// Distance `‖(f_θ, g_θ) − (f_θ', g_θ')‖_∞` between two types in
    /// normalized units, when the family can compute it.
    fn type_distance(&self, _a: &TypeRealization, _b: &TypeRealization) -> Option<f64> {
        None
    }

    /// `L` such that `type_distance(a, b) = L · ‖a − b‖_∞`, for families whose
    /// metric has that form.
    fn sup_norm_lipschitz(&self) -> Option<f64> {
        None
    }
}

/// Raw `(p(c) + f(θ,x), g(θ,c,x))` after checking recourse feasibility.
pub fn evaluate_stage_costs_raw<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    x: &[f64],
) -> Result<StageCosts> {
    ensure_feasible(family, theta, c, x, FEASIBILITY_TOL)?;
    Ok(StageCosts {
        objective: family.first_stage_cost(c) + family.second_stage_objective(theta, x),
        g: family.constraint_values(theta, c, x),
    })
}

/// Normalized `(p(c) + f(θ,x), g(θ,c,x))`.
pub fn evaluate_stage_costs<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    x: &[f64],
) -> Result<StageCosts> {
    let raw = evaluate_stage_costs_raw(family, theta, c, x)?;
    Ok(normalize(family.scale(), raw))
}

pub fn normalize(scale: ScaleBounds, raw: StageCosts) -> StageCosts {
    StageCosts {
        objective: raw.objective / scale.objective,
        g: raw.g.into_iter().map(|v| v / scale.constraint).collect(),
    }
}

pub fn check_second_stage_feasible<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    x: &[f64],
    tol: f64,
) -> bool {
    ensure_feasible(family, theta, c, x, tol).is_ok()
}

fn ensure_feasible<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    x: &[f64],
    tol: f64,
) -> Result<()> {
    if x.len() != family.second_stage_dim() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Infeasible {
            constraint: "dimension".into(),
            residual: f64::INFINITY,
        });
    }
    let scale = family.scale().constraint;
    let worst = family
        .second_stage_residuals(theta, c, x)
        .into_iter()
        .map(|(name, r)| (name, r / scale))
        .filter(|(_, r)| *r > tol)
        .max_by(|a, b| a.1.total_cmp(&b.1));
    match worst {
        Some((constraint, residual)) => Err(Error::Infeasible {
            constraint,
            residual,
        }),
        None => Ok(()),
    }
}

/// The resource-allocation family of the benchmark experiments.
///
/// `n` resources each face a demand `D_i ≥ 0`; the first-stage budget `c`
/// lives in `[0, budget_cap]` and `g_i = x_i`.
///
/// - Packing: maximize the committed budget (`p(c) = -c`) which must be
///   served, `K = {0 ≤ x ≤ D, Σ x ≥ min(c, Σ D)}`.
/// - Covering: pay for the budget (`p(c) = c`) which caps what can be
///   served, `K = {0 ≤ x ≤ D, Σ x ≤ c}`.
///
/// Objectives are scaled by `budget_cap`, consumption by `capacity_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceAllocation {
    beta: Vec<f64>,
    budget_cap: f64,
    capacity_scale: f64,
    direction: ConstraintDirection,
    first_stage: BoxSet,
}

impl ResourceAllocation {
    pub fn new(
        beta: Vec<f64>,
        budget_cap: f64,
        capacity_scale: f64,
        direction: ConstraintDirection,
    ) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::config("at least one resource is required"));
        }
        if beta.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
            return Err(Error::config("every beta must lie in (0, 1)"));
        }
        if !(budget_cap > 0.0 && budget_cap.is_finite()) {
            return Err(Error::config("budget_cap must be positive"));
        }
        if !(capacity_scale > 0.0 && capacity_scale.is_finite()) {
            return Err(Error::config("capacity_scale must be positive"));
        }
        Ok(ResourceAllocation {
            first_stage: BoxSet::interval(0.0, budget_cap)?,
            beta,
            budget_cap,
            capacity_scale,
            direction,
        })
    }

    pub fn n_resources(&self) -> usize {
        self.beta.len()
    }

    pub fn budget_cap(&self) -> f64 {
        self.budget_cap
    }

    pub fn capacity_scale(&self) -> f64 {
        self.capacity_scale
    }

    /// Resource visiting order of the greedy fill: cheapest first for
    /// packing, most rewarding first for covering; ties by index.
    fn fill_order(&self, prices: &[f64]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.beta.len()).collect();
        match self.direction {
            ConstraintDirection::Packing => {
                order.sort_by(|&a, &b| prices[a].total_cmp(&prices[b]).then(a.cmp(&b)))
            }
            ConstraintDirection::Covering => {
                order.sort_by(|&a, &b| prices[b].total_cmp(&prices[a]).then(a.cmp(&b)))
            }
        }
        order
    }

    fn check_prices(&self, prices: &[f64]) -> Result<()> {
        if prices.len() != self.beta.len() {
            return Err(Error::config("price vector has the wrong dimension"));
        }
        if prices.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::NonFinite { what: "prices" });
        }
        Ok(())
    }
}

impl TwoStageFamily for ResourceAllocation {
    fn num_constraints(&self) -> usize {
        self.beta.len()
    }

    fn second_stage_dim(&self) -> usize {
        self.beta.len()
    }

    fn direction(&self) -> ConstraintDirection {
        self.direction
    }

    fn beta(&self) -> &[f64] {
        &self.beta
    }

    fn first_stage_set(&self) -> &BoxSet {
        &self.first_stage
    }

    fn scale(&self) -> ScaleBounds {
        ScaleBounds {
            objective: self.budget_cap,
            constraint: self.capacity_scale,
        }
    }

    fn first_stage_cost(&self, c: &[f64]) -> f64 {
        -self.direction.sign() * c[0]
    }

    fn first_stage_cost_gradient(&self, _c: &[f64]) -> Vec<f64> {
        vec![-self.direction.sign()]
    }

    fn second_stage_objective(&self, _theta: &TypeRealization, _x: &[f64]) -> f64 {
        0.0
    }

    fn constraint_values(&self, _theta: &TypeRealization, _c: &[f64], x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }

    fn second_stage_residuals(
        &self,
        theta: &TypeRealization,
        c: &[f64],
        x: &[f64],
    ) -> Vec<(String, f64)> {
        let d = theta.as_slice();
        let mut out = Vec::with_capacity(2 * d.len() + 1);
        for (i, (xi, di)) in x.iter().zip(d).enumerate() {
            out.push((format!("x_{} >= 0", i + 1), -xi));
            out.push((format!("x_{} <= D_{}", i + 1, i + 1), xi - di));
        }
        let served: f64 = x.iter().sum();
        let total: f64 = d.iter().sum();
        match self.direction {
            ConstraintDirection::Packing => {
                out.push(("sum x >= min(c, sum D)".into(), c[0].min(total) - served))
            }
            ConstraintDirection::Covering => out.push(("sum x <= c".into(), served - c[0])),
        }
        out
    }

    fn validate_type(&self, theta: &TypeRealization) -> Result<()> {
        if theta.0.len() != self.beta.len() {
            return Err(Error::config("demand vector has the wrong dimension"));
        }
        if theta.0.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::config("demands must be finite and nonnegative"));
        }
        Ok(())
    }

    fn inner_solve(
        &self,
        theta: &TypeRealization,
        c: &[f64],
        prices: &[f64],
    ) -> Result<InnerSolution> {
        self.validate_type(theta)?;
        self.check_prices(prices)?;
        let sign = self.direction.sign();
        let d = theta.as_slice();
        let total: f64 = d.iter().sum();
        let mut remaining = c[0].max(0.0).min(total);
        let mut x = vec![0.0; d.len()];
        let mut value = 0.0;
        let mut marginal = None;
        for i in self.fill_order(prices) {
            if remaining <= 0.0 {
                if marginal.is_none() && d[i] > 0.0 {
                    marginal = Some(i);
                }
                continue;
            }
            let take = d[i].min(remaining);
            x[i] = take;
            remaining -= take;
            value += sign * prices[i] * take / self.capacity_scale;
            if take < d[i] && marginal.is_none() {
                marginal = Some(i);
            }
        }
        let slope = if c[0] < total {
            marginal.map_or(0.0, |i| sign * prices[i] / self.capacity_scale)
        } else {
            0.0
        };
        Ok(InnerSolution {
            x,
            value,
            c_subgradient: vec![slope],
        })
    }

    /// Exact minimization: the averaged objective is piecewise linear in `c`
    /// with breakpoints at the per-sample cumulative demands, so a sorted sweep
    /// over the breakpoints finds the global minimum (smallest `c` on ties).
    fn first_stage_argmin(&self, samples: &[WeightedType], prices: &[f64]) -> Result<FirstStageMin> {
        self.check_prices(prices)?;
        let sign = self.direction.sign();
        let order = self.fill_order(prices);
        let unit: Vec<f64> = order
            .iter()
            .map(|&i| sign * prices[i] / self.capacity_scale)
            .collect();
        let (lo, hi) = (0.0, self.budget_cap);

        let mut events: Vec<(f64, f64)> = Vec::with_capacity(samples.len() * (order.len() + 1));
        let mut value_at_lo = -sign * lo / self.budget_cap;
        for s in samples {
            self.validate_type(&s.theta)?;
            let d = s.theta.as_slice();
            let mut cum = 0.0;
            let mut prev = 0.0;
            for (k, &i) in order.iter().enumerate() {
                if d[i] <= 0.0 {
                    continue;
                }
                events.push((cum, s.weight * (unit[k] - prev)));
                prev = unit[k];
                let before = cum;
                cum += d[i];
                value_at_lo += s.weight * unit[k] * (lo.min(cum) - before.min(lo)).max(0.0);
            }
            events.push((cum, -s.weight * prev));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut slope = -sign / self.budget_cap;
        let mut idx = 0;
        while idx < events.len() && events[idx].0 <= lo {
            slope += events[idx].1;
            idx += 1;
        }
        let (mut best_c, mut best_v) = (lo, value_at_lo);
        let (mut pos, mut val) = (lo, value_at_lo);
        while idx < events.len() && events[idx].0 < hi {
            let next = events[idx].0;
            val += slope * (next - pos);
            pos = next;
            while idx < events.len() && events[idx].0 == next {
                slope += events[idx].1;
                idx += 1;
            }
            if val < best_v - 1e-15 * best_v.abs().max(1.0) {
                best_c = pos;
                best_v = val;
            }
        }
        val += slope * (hi - pos);
        if val < best_v - 1e-15 * best_v.abs().max(1.0) {
            best_c = hi;
            best_v = val;
        }
        Ok(FirstStageMin {
            c: vec![best_c],
            value: best_v,
        })
    }

    fn type_distance(&self, a: &TypeRealization, b: &TypeRealization) -> Option<f64> {
        if a.0.len() != b.0.len() {
            return None;
        }
        let d = a
            .0
            .iter()
            .zip(&b.0)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        Some(d / self.capacity_scale)
    }

    fn sup_norm_lipschitz(&self) -> Option<f64> {
        Some(1.0 / self.capacity_scale)
    }
}

/// Linear family over a recourse box: `K(θ,c) = [0, upper]^n`,
/// `f_θ(x) = θ · x`, `g(x) = A x` with a fixed nonnegative matrix, and a
/// linear first-stage cost over `C`. It relies on the generic projected
/// subgradient inner solver; the lower-bound scenario constructions use it.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBoxFamily {
    pub upper: Vec<f64>,
    pub consumption: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    pub direction: ConstraintDirection,
    pub first_stage: BoxSet,
    pub first_stage_cost: Vec<f64>,
    pub scale: ScaleBounds,
}

impl LinearBoxFamily {
    /// One decision `x ∈ [0, 1]`, one constraint `g = x`, no first stage.
    pub fn scalar(beta: f64, objective_scale: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::config("beta must lie in (0, 1)"));
        }
        Ok(LinearBoxFamily {
            upper: vec![1.0],
            consumption: vec![vec![1.0]],
            beta: vec![beta],
            direction: ConstraintDirection::Packing,
            first_stage: BoxSet::interval(0.0, 0.0)?,
            first_stage_cost: vec![0.0],
            scale: ScaleBounds {
                objective: objective_scale,
                constraint: 1.0,
            },
        })
    }
}

impl TwoStageFamily for LinearBoxFamily {
    fn num_constraints(&self) -> usize {
        self.beta.len()
    }

    fn second_stage_dim(&self) -> usize {
        self.upper.len()
    }

    fn direction(&self) -> ConstraintDirection {
        self.direction
    }

    fn beta(&self) -> &[f64] {
        &self.beta
    }

    fn first_stage_set(&self) -> &BoxSet {
        &self.first_stage
    }

    fn scale(&self) -> ScaleBounds {
        self.scale
    }

    fn first_stage_cost(&self, c: &[f64]) -> f64 {
        c.iter().zip(&self.first_stage_cost).map(|(a, b)| a * b).sum()
    }

    fn first_stage_cost_gradient(&self, _c: &[f64]) -> Vec<f64> {
        self.first_stage_cost.clone()
    }

    fn second_stage_objective(&self, theta: &TypeRealization, x: &[f64]) -> f64 {
        theta.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn constraint_values(&self, _theta: &TypeRealization, _c: &[f64], x: &[f64]) -> Vec<f64> {
        self.consumption
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn second_stage_residuals(
        &self,
        _theta: &TypeRealization,
        _c: &[f64],
        x: &[f64],
    ) -> Vec<(String, f64)> {
        x.iter()
            .zip(&self.upper)
            .enumerate()
            .flat_map(|(j, (v, u))| {
                [
                    (format!("x_{} >= 0", j + 1), -v),
                    (format!("x_{} <= {}", j + 1, u), v - u),
                ]
            })
            .collect()
    }

    fn project_second_stage(
        &self,
        _theta: &TypeRealization,
        _c: &[f64],
        x: &mut [f64],
    ) -> Result<()> {
        for (v, u) in x.iter_mut().zip(&self.upper) {
            *v = v.clamp(0.0, *u);
        }
        Ok(())
    }

    fn type_distance(&self, a: &TypeRealization, b: &TypeRealization) -> Option<f64> {
        // sup over the recourse box of |(θ − θ') · x|; g does not depend on θ.
        if a.0.len() != b.0.len() {
            return None;
        }
        let d: f64 = a
            .0
            .iter()
            .zip(&b.0)
            .zip(&self.upper)
            .map(|((x, y), u)| (x - y).abs() * u)
            .sum();
        Some(d / self.scale.objective)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::inner::grid_inner_value;

    fn resource(n: usize, dir: ConstraintDirection) -> ResourceAllocation {
        ResourceAllocation::new(vec![0.5; n], 3.0, 1.0, dir).unwrap()
    }

    #[test]
    fn null_action_costs_nothing() {
        let fam = ResourceAllocation::new(vec![0.95, 0.9, 0.85, 0.8], 40.0, 10.0, ConstraintDirection::Packing).unwrap();
        let theta = TypeRealization::zeros(4);
        let out = evaluate_stage_costs(&fam, &theta, &[0.0], &[0.0; 4]).unwrap();
        assert_eq!(out.objective, 0.0);
        assert_eq!(out.g, vec![0.0; 4]);
    }

    #[test]
    fn raw_costs_of_a_served_budget() {
        let fam = resource(2, ConstraintDirection::Packing);
        let theta = TypeRealization::new(vec![2.0, 2.0]);
        let out = evaluate_stage_costs_raw(&fam, &theta, &[3.0], &[1.0, 2.0]).unwrap();
        assert_eq!(out.objective, -3.0);
        assert_eq!(out.g, vec![1.0, 2.0]);
    }

    #[test]
    fn unmet_coupling_is_reported_by_name() {
        let fam = resource(2, ConstraintDirection::Packing);
        let theta = TypeRealization::new(vec![1.0, 1.0]);
        match evaluate_stage_costs(&fam, &theta, &[3.0], &[0.0, 0.0]) {
            Err(Error::Infeasible { constraint, residual }) => {
                assert!(constraint.contains("min(c, sum D)"));
                assert_eq!(residual, 2.0);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_checks() {
        let fam = resource(2, ConstraintDirection::Packing);
        let d = TypeRealization::new(vec![2.0, 2.0]);
        assert!(check_second_stage_feasible(&fam, &d, &[3.0], &[1.0, 2.0], 1e-9));
        assert!(check_second_stage_feasible(&fam, &TypeRealization::new(vec![5.0, 1.0]), &[0.0], &[0.0, 0.0], 1e-9));
        assert!(!check_second_stage_feasible(&fam, &d, &[3.0], &[3.0, 0.0], 1e-9));
        let cov = resource(2, ConstraintDirection::Covering);
        assert!(check_second_stage_feasible(&cov, &d, &[3.0], &[1.0, 2.0], 1e-9));
        assert!(!check_second_stage_feasible(&cov, &d, &[2.0], &[1.0, 2.0], 1e-9));
    }

    #[test]
    fn rejects_bad_beta() {
        assert!(ResourceAllocation::new(vec![1.0], 1.0, 1.0, ConstraintDirection::Packing).is_err());
        assert!(ResourceAllocation::new(vec![0.0], 1.0, 1.0, ConstraintDirection::Packing).is_err());
    }

    #[test]
    fn greedy_fills_cheapest_resource_first() {
        // λ = μ e_1 with μ = T, β = 0.5: ν = (2, 0).
        let fam = resource(2, ConstraintDirection::Packing);
        let theta = TypeRealization::new(vec![2.0, 2.0]);
        let sol = fam.inner_solve(&theta, &[3.0], &[2.0, 0.0]).unwrap();
        assert_eq!(sol.x, vec![1.0, 2.0]);
        assert_eq!(sol.value, 2.0);
        assert_eq!(sol.c_subgradient, vec![2.0]);
        let oracle = grid_inner_value(&fam, &theta, &[3.0], &[2.0, 0.0], 0.01);
        assert!((oracle - sol.value).abs() < 1e-9);
    }

    #[test]
    fn zero_prices_fill_by_index() {
        let fam = resource(3, ConstraintDirection::Packing);
        let theta = TypeRealization::new(vec![1.0, 1.0, 1.0]);
        let sol = fam.inner_solve(&theta, &[1.5], &[0.0; 3]).unwrap();
        assert_eq!(sol.x, vec![1.0, 0.5, 0.0]);
        assert_eq!(sol.value, 0.0);
        let zero = fam.inner_solve(&theta, &[0.0], &[1.0; 3]).unwrap();
        assert_eq!(zero.x, vec![0.0; 3]);
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn covering_fills_rewarding_resource_first() {
        let fam = resource(2, ConstraintDirection::Covering);
        let theta = TypeRealization::new(vec![2.0, 2.0]);
        let sol = fam.inner_solve(&theta, &[3.0], &[0.0, 2.0]).unwrap();
        assert_eq!(sol.x, vec![1.0, 2.0]);
        assert_eq!(sol.value, -4.0);
        // marginal unit goes to the zero-price resource
        assert_eq!(sol.c_subgradient, vec![0.0]);
        let sol = fam.inner_solve(&theta, &[1.0], &[0.0, 2.0]).unwrap();
        assert_eq!(sol.c_subgradient, vec![-2.0]);
    }
}
