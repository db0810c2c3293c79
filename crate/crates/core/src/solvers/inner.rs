//! The per-period inner problem, the single-period Lagrangian and the
//! per-constraint feedback handed to the dual learner.
//!
//! Multipliers `λ` are given on the `μ · Δ_m` scale; they reach the inner
//! problem as prices `ν_i = λ_i / (T β_i)` on normalized constraint values.

use crate::problem::{FirstStageMin, TwoStageFamily, TypeRealization, WeightedType, FEASIBILITY_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    /// Minimizing second-stage action (raw units).
    pub x: Vec<f64>,
    /// Inner objective at `x`, normalized.
    pub value: f64,
    /// Subgradient of the inner optimal value with respect to `c`. The
    /// first-stage cost gradient is not included.
    pub c_subgradient: Vec<f64>,
}

const GENERIC_ITERATIONS: usize = 500;

/// `ν_i = λ_i / (T β_i)`.
pub fn prices_for(lambda: &[f64], horizon: usize, beta: &[f64]) -> Vec<f64> {
    lambda
        .iter()
        .zip(beta)
        .map(|(l, b)| l / (horizon as f64 * b))
        .collect()
}

fn check_inputs<F: TwoStageFamily + ?Sized>(family: &F, c: &[f64], lambda: &[f64]) -> Result<()> {
    if !family.first_stage_set().contains(c, FEASIBILITY_TOL) {
        return Err(Error::config(format!("first-stage action {c:?} outside C")));
    }
    if lambda.len() != family.num_constraints() {
        return Err(Error::config("multiplier vector has the wrong dimension"));
    }
    if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::config("multipliers must be finite and nonnegative"));
    }
    Ok(())
}

/// Minimizes `f(θ,x) ± Σ λ_i g_i(θ,c,x)/(T β_i)` over `K(θ, c)`.
pub fn inner_solve<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    lambda: &[f64],
    horizon: usize,
) -> Result<InnerSolution> {
    check_inputs(family, c, lambda)?;
    family.inner_solve(theta, c, &prices_for(lambda, horizon, family.beta()))
}

/// Value and full first-stage subgradient of `L̄(·, λ, θ)` at `c`, together
/// with the inner solution that realizes it.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPoint {
    pub value: f64,
    pub subgradient: Vec<f64>,
    pub inner: InnerSolution,
}

pub fn lagrangian_at<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    lambda: &[f64],
    horizon: usize,
) -> Result<LagrangianPoint> {
    let inner = inner_solve(family, theta, c, lambda, horizon)?;
    let f_max = family.scale().objective;
    let sign = family.direction().sign();
    let offset = lambda.iter().sum::<f64>() / horizon as f64;
    let value = family.first_stage_cost(c) / f_max - sign * offset + inner.value;
    let subgradient = family
        .first_stage_cost_gradient(c)
        .iter()
        .zip(&inner.c_subgradient)
        .map(|(p, v)| p / f_max + v)
        .collect();
    Ok(LagrangianPoint {
        value,
        subgradient,
        inner,
    })
}

/// `L̄(c, λ, θ)`, packing or covering according to the family.
pub fn single_period_lagrangian<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    lambda: &[f64],
    horizon: usize,
) -> Result<f64> {
    lagrangian_at(family, theta, c, lambda, horizon).map(|p| p.value)
}

/// Feedback vector `(L̄_i(c, μ e_{i_t}, θ))_i` for the dual learner, computed
/// from the realized action `x`.
///
/// With `targets = None` each expert is charged `μ / T`; with per-period
/// targets `β̂_t` it is charged `μ β̂_{i,t} / (T β_i)` instead.
pub fn constraint_feedback<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    x: &[f64],
    mu: f64,
    horizon: usize,
    targets: Option<&[f64]>,
) -> Vec<f64> {
    let scale = family.scale();
    let sign = family.direction().sign();
    let t = horizon as f64;
    let base = (family.first_stage_cost(c) + family.second_stage_objective(theta, x)) / scale.objective;
    let g = family.constraint_values(theta, c, x);
    family
        .beta()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let charge = match targets {
                Some(hat) => mu * hat[i] / (t * b),
                None => mu / t,
            };
            base + sign * (mu * g[i] / scale.constraint / (t * b) - charge)
        })
        .collect()
}

fn inner_objective<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    x: &[f64],
    prices: &[f64],
) -> f64 {
    let scale = family.scale();
    let sign = family.direction().sign();
    let g = family.constraint_values(theta, c, x);
    family.second_stage_objective(theta, x) / scale.objective
        + sign * prices.iter().zip(&g).map(|(p, v)| p * v).sum::<f64>() / scale.constraint
}

/// Projected subgradient on `K(θ, c)` with diminishing steps, for families
/// without a closed-form inner solver. The first-stage subgradient comes from
/// central differences of the optimal value.
pub fn generic_inner_solve<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    prices: &[f64],
) -> Result<InnerSolution> {
    let (x, value) = projected_descent(family, theta, c, prices)?;
    let set = family.first_stage_set();
    let mut c_subgradient = vec![0.0; c.len()];
    for (j, w) in set.widths().into_iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let h = 1e-6 * w;
        let mut up = c.to_vec();
        let mut down = c.to_vec();
        up[j] = (c[j] + h).min(set.hi()[j]);
        down[j] = (c[j] - h).max(set.lo()[j]);
        let vu = projected_descent(family, theta, &up, prices)?.1;
        let vd = projected_descent(family, theta, &down, prices)?.1;
        c_subgradient[j] = (vu - vd) / (up[j] - down[j]);
    }
    Ok(InnerSolution {
        x,
        value,
        c_subgradient,
    })
}

fn projected_descent<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    prices: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let n = family.second_stage_dim();
    let mut x = vec![0.0; n];
    family.project_second_stage(theta, c, &mut x)?;
    let mut best = (x.clone(), inner_objective(family, theta, c, &x, prices));
    let radius = family.scale().constraint;
    for k in 0..GENERIC_ITERATIONS {
        let grad: Vec<f64> = (0..n)
            .map(|j| {
                let h = 1e-7 * radius.max(x[j].abs());
                let mut a = x.clone();
                let mut b = x.clone();
                a[j] += h;
                b[j] -= h;
                (inner_objective(family, theta, c, &a, prices)
                    - inner_objective(family, theta, c, &b, prices))
                    / (2.0 * h)
            })
            .collect();
        let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite { what: "inner gradient" });
        }
        if norm < 1e-12 {
            break;
        }
        let step = radius / ((k + 1) as f64).sqrt() / norm;
        for (v, g) in x.iter_mut().zip(&grad) {
            *v -= step * g;
        }
        family.project_second_stage(theta, c, &mut x)?;
        let val = inner_objective(family, theta, c, &x, prices);
        if val < best.1 {
            best = (x.clone(), val);
        }
    }
    Ok(best)
}

/// Averaged first-stage objective `E[p(c)/f_max + inner value]` at `c`.
pub fn averaged_first_stage_value<F: TwoStageFamily + ?Sized>(
    family: &F,
    samples: &[WeightedType],
    c: &[f64],
    prices: &[f64],
) -> Result<f64> {
    let mut v = family.first_stage_cost(c) / family.scale().objective;
    for s in samples {
        v += s.weight * family.inner_solve(&s.theta, c, prices)?.value;
    }
    Ok(v)
}

/// Grid search plus local golden-section refinement over a box of dimension
/// at most two; coordinate-wise refinement otherwise.
pub fn generic_first_stage_argmin<F: TwoStageFamily + ?Sized>(
    family: &F,
    samples: &[WeightedType],
    prices: &[f64],
) -> Result<FirstStageMin> {
    let set = family.first_stage_set();
    let lo = set.lo().to_vec();
    let widths = set.widths();
    let eval = |c: &[f64]| averaged_first_stage_value(family, samples, c, prices);
    let active: Vec<usize> = (0..lo.len()).filter(|&j| widths[j] > 0.0).collect();
    let mut best_c = lo.clone();
    let mut best_v = eval(&best_c)?;
    if active.is_empty() {
        return Ok(FirstStageMin { c: best_c, value: best_v });
    }
    let per_axis: usize = if active.len() == 1 { 256 } else { 32 };
    let points = (per_axis + 1).pow(active.len().min(2) as u32);
    for k in 0..points {
        let mut c = lo.clone();
        let mut rest = k;
        for &j in active.iter().take(2) {
            let step = rest % (per_axis + 1);
            rest /= per_axis + 1;
            c[j] = lo[j] + widths[j] * step as f64 / per_axis as f64;
        }
        let v = eval(&c)?;
        if v < best_v {
            best_v = v;
            best_c = c;
        }
    }
    // refine each coordinate within one grid cell
    for &j in &active {
        let cell = widths[j] / per_axis as f64;
        let (mut a, mut b) = (
            (best_c[j] - cell).max(lo[j]),
            (best_c[j] + cell).min(lo[j] + widths[j]),
        );
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let m1 = b - ratio * (b - a);
            let m2 = a + ratio * (b - a);
            let mut c1 = best_c.clone();
            let mut c2 = best_c.clone();
            c1[j] = m1;
            c2[j] = m2;
            if eval(&c1)? <= eval(&c2)? {
                b = m2;
            } else {
                a = m1;
            }
        }
        let mut c = best_c.clone();
        c[j] = 0.5 * (a + b);
        let v = eval(&c)?;
        if v < best_v {
            best_v = v;
            best_c = c;
        }
    }
    Ok(FirstStageMin {
        c: best_c,
        value: best_v,
    })
}

/// Test oracle: minimizes the inner objective of the resource family over a
/// uniform grid of recourse actions. Only usable for tiny dimensions.
#[cfg(test)]
pub(crate) fn grid_inner_value<F: TwoStageFamily + ?Sized>(
    family: &F,
    theta: &TypeRealization,
    c: &[f64],
    prices: &[f64],
    resolution: f64,
) -> f64 {
    let d = theta.as_slice();
    let steps: Vec<usize> = d.iter().map(|v| (v / resolution).round() as usize).collect();
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; d.len()];
    loop {
        let x: Vec<f64> = idx
            .iter()
            .zip(d)
            .zip(&steps)
            .map(|((k, dv), s)| if *s == 0 { 0.0 } else { dv * *k as f64 / *s as f64 })
            .collect();
        if crate::problem::check_second_stage_feasible(family, theta, c, &x, 1e-9) {
            best = best.min(inner_objective(family, theta, c, &x, prices));
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return best;
            }
            idx[j] += 1;
            if idx[j] <= steps[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}
