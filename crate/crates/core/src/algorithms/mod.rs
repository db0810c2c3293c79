//! Full-horizon run loops.

pub mod dal;
pub mod ial;
pub mod trace;

pub use dal::{dal_run, DalConfig, DalMu};
pub use ial::{ial_precompute, ial_run, IalConfig, IalMu, IalPlan};
pub use trace::{PeriodRecord, RunTrace};

use crate::environments::CorruptedHorizon;
use crate::problem::{evaluate_stage_costs_raw, TwoStageFamily, TypeRealization};
use crate::Result;

/// Types a run observes, with the per-period corruption flags.
#[derive(Debug, Clone, Copy)]
pub struct Horizon<'a> {
    pub observed: &'a [TypeRealization],
    pub corrupted: &'a [bool],
}

impl<'a> Horizon<'a> {
    pub fn clean(observed: &'a [TypeRealization]) -> Self {
        Horizon {
            observed,
            corrupted: &[],
        }
    }
}

impl<'a> From<&'a CorruptedHorizon> for Horizon<'a> {
    fn from(h: &'a CorruptedHorizon) -> Self {
        Horizon {
            observed: &h.observed,
            corrupted: &h.corrupted,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn record<F: TwoStageFamily + ?Sized>(
    family: &F,
    t: usize,
    c: Vec<f64>,
    i_dual: Option<usize>,
    corrupted: bool,
    theta: &TypeRealization,
    x: Vec<f64>,
    cum: &mut [f64],
) -> Result<PeriodRecord> {
    let costs = evaluate_stage_costs_raw(family, theta, &c, &x)?;
    for (acc, g) in cum.iter_mut().zip(&costs.g) {
        *acc += g;
    }
    Ok(PeriodRecord {
        t,
        c,
        i_dual,
        corrupted,
        x,
        obj_inc: costs.objective,
        g: costs.g,
        cum_g: cum.to_vec(),
        terminated: false,
    })
}

fn null_record<F: TwoStageFamily + ?Sized>(family: &F, t: usize, corrupted: bool, cum: &[f64]) -> PeriodRecord {
    PeriodRecord {
        t,
        c: vec![0.0; family.first_stage_set().dim()],
        i_dual: None,
        corrupted,
        x: vec![0.0; family.second_stage_dim()],
        obj_inc: 0.0,
        g: vec![0.0; family.num_constraints()],
        cum_g: cum.to_vec(),
        terminated: true,
    }
}
