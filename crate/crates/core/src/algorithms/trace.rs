use crate::problem::ConstraintDirection;

/// One period of a run, in raw units.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    /// 1-based period.
    pub t: usize,
    pub c: Vec<f64>,
    /// 0-based constraint drawn by the dual learner; `None` on padded periods.
    pub i_dual: Option<usize>,
    pub corrupted: bool,
    pub x: Vec<f64>,
    pub obj_inc: f64,
    pub g: Vec<f64>,
    pub cum_g: Vec<f64>,
    /// Set on the null periods after early termination.
    pub terminated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: String,
    pub direction: ConstraintDirection,
    /// Normalized targets.
    pub beta: Vec<f64>,
    pub capacity_scale: f64,
    pub records: Vec<PeriodRecord>,
    /// Period whose consumption first exceeded a packing target.
    pub terminated_at: Option<usize>,
    pub mu: f64,
    /// Hedge feedback entries clipped to `±δ`.
    pub clipped: usize,
    /// Realized corruption count.
    pub w: usize,
}

impl RunTrace {
    pub fn horizon(&self) -> usize {
        self.records.len()
    }

    /// Total raw objective.
    pub fn objective(&self) -> f64 {
        self.records.iter().map(|r| r.obj_inc).sum()
    }

    /// Total raw consumption per constraint.
    pub fn consumption(&self) -> Vec<f64> {
        self.records
            .last()
            .map(|r| r.cum_g.clone())
            .unwrap_or_else(|| vec![0.0; self.beta.len()])
    }

    /// Normalized running average `(1/t) Σ_{s≤t} g_s` after every period.
    pub fn running_average(&self) -> Vec<Vec<f64>> {
        self.records
            .iter()
            .map(|r| r.cum_g.iter().map(|v| v / (r.t as f64 * self.capacity_scale)).collect())
            .collect()
    }

    /// Worst signed violation `max_i` of the normalized terminal average
    /// against its target; positive means some constraint is violated.
    pub fn d_t(&self) -> f64 {
        let t = self.horizon().max(1) as f64;
        self.consumption()
            .iter()
            .zip(&self.beta)
            .map(|(g, b)| self.direction.violation(g / (t * self.capacity_scale), *b))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Worst signed violation after every period, measured on the running
    /// average.
    pub fn running_violation(&self) -> Vec<f64> {
        self.running_average()
            .into_iter()
            .map(|avg| {
                avg.iter()
                    .zip(&self.beta)
                    .map(|(a, b)| self.direction.violation(*a, *b))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}
