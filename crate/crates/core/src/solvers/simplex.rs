//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Solves `min c·x` subject to linear rows and `x ≥ 0`. Dual values are the
//! sensitivities `∂ value / ∂ rhs_i`: nonpositive on `≤` rows and
//! nonnegative on `≥` rows at an optimum.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefficients: Vec<f64>,
    pub kind: RowKind,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub duals: Vec<f64>,
}

const EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coefficients: Vec<f64>, kind: RowKind, rhs: f64) {
        self.rows.push(Row {
            coefficients,
            kind,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self)?.run(self)
    }
}

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_struct: usize,
    /// Column holding the initial identity entry of each row.
    identity: Vec<usize>,
    artificial_start: usize,
    flipped: Vec<bool>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Result<Self> {
        let n = lp.objective.len();
        let m = lp.rows.len();
        if lp.rows.iter().any(|r| r.coefficients.len() != n) {
            return Err(Error::config("constraint row length differs from objective"));
        }
        let finite = lp.objective.iter().all(|v| v.is_finite())
            && lp
                .rows
                .iter()
                .all(|r| r.rhs.is_finite() && r.coefficients.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::NonFinite { what: "linear program" });
        }
        let mut kinds = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for r in &lp.rows {
            let flip = r.rhs < 0.0;
            flipped.push(flip);
            kinds.push(match (r.kind, flip) {
                (RowKind::Le, true) => RowKind::Ge,
                (RowKind::Ge, true) => RowKind::Le,
                (k, _) => k,
            });
        }
        let n_slack = kinds.iter().filter(|k| **k != RowKind::Eq).count();
        let n_art = kinds.iter().filter(|k| **k != RowKind::Le).count();
        let artificial_start = n + n_slack;
        let width = artificial_start + n_art + 1;
        let mut a = vec![vec![0.0; width]; m];
        let mut basis = vec![0; m];
        let mut identity = vec![0; m];
        let (mut s, mut art) = (n, artificial_start);
        for (i, r) in lp.rows.iter().enumerate() {
            let sgn = if flipped[i] { -1.0 } else { 1.0 };
            for (j, v) in r.coefficients.iter().enumerate() {
                a[i][j] = sgn * v;
            }
            a[i][width - 1] = sgn * r.rhs;
            match kinds[i] {
                RowKind::Le => {
                    a[i][s] = 1.0;
                    basis[i] = s;
                    identity[i] = s;
                    s += 1;
                }
                RowKind::Ge => {
                    a[i][s] = -1.0;
                    s += 1;
                    a[i][art] = 1.0;
                    basis[i] = art;
                    identity[i] = art;
                    art += 1;
                }
                RowKind::Eq => {
                    a[i][art] = 1.0;
                    basis[i] = art;
                    identity[i] = art;
                    art += 1;
                }
            }
        }
        Ok(Tableau {
            a,
            basis,
            n_struct: n,
            identity,
            artificial_start,
            flipped,
        })
    }

    fn width(&self) -> usize {
        self.a.first().map_or(self.artificial_start + 1, |r| r.len())
    }

    fn pivot(&mut self, row: usize, col: usize, cost: &mut [f64]) {
        let p = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[row].clone();
        for (i, r) in self.a.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        let f = cost[col];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[row] = col;
    }

    /// Reduced-cost row for the given column costs (last entry: −value).
    fn priced(&self, costs: &[f64]) -> Vec<f64> {
        let mut row = costs.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb != 0.0 {
                for (v, av) in row.iter_mut().zip(&self.a[i]) {
                    *v -= cb * av;
                }
            }
        }
        row
    }

    /// Bland's rule iterations over columns `< allowed`.
    fn optimize(&mut self, cost: &mut [f64], allowed: usize) -> Result<()> {
        let rhs = self.width() - 1;
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| cost[j] < -EPS) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, r) in self.a.iter().enumerate() {
                if r[col] > EPS {
                    let ratio = r[rhs] / r[col];
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - EPS || (ratio <= br + EPS && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = best else {
                return Err(Error::LpUnbounded);
            };
            self.pivot(row, col, cost);
        }
        Err(Error::NoConvergence {
            what: "simplex",
            iterations: MAX_PIVOTS,
            gap: f64::NAN,
        })
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let width = self.width();
        let rhs = width - 1;
        let scale = 1.0
            + lp
                .rows
                .iter()
                .map(|r| r.rhs.abs())
                .fold(0.0, f64::max);

        if self.artificial_start < rhs {
            let mut phase1 = vec![0.0; width];
            for v in &mut phase1[self.artificial_start..rhs] {
                *v = 1.0;
            }
            let mut cost = self.priced(&phase1);
            self.optimize(&mut cost, rhs)?;
            if -cost[rhs] > 1e-9 * scale {
                return Err(Error::LpInfeasible);
            }
            // drive zero-level artificials out of the basis where possible
            for i in 0..self.basis.len() {
                if self.basis[i] >= self.artificial_start {
                    if let Some(col) = (0..self.artificial_start).find(|&j| self.a[i][j].abs() > 1e-9) {
                        self.pivot(i, col, &mut cost);
                    }
                }
            }
        }

        let mut phase2 = vec![0.0; width];
        phase2[..self.n_struct].copy_from_slice(&lp.objective);
        let mut cost = self.priced(&phase2);
        self.optimize(&mut cost, self.artificial_start)?;

        let mut x = vec![0.0; self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.a[i][rhs].max(0.0);
            }
        }
        let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let duals = self
            .identity
            .iter()
            .zip(&self.flipped)
            .map(|(&j, &flip)| {
                let y = -cost[j];
                if flip {
                    -y
                } else {
                    y
                }
            })
            .collect();
        Ok(LpSolution { x, value, duals })
    }
}
