//! Adversarial learners used as players in the primal-dual loops.
//!
//! All three are plain values: a run owns its learners and mutates them
//! in place, one update per period.

pub mod exp3;
pub mod hedge;
pub mod ogd;

pub use exp3::Exp3State;
pub use hedge::HedgeState;
pub use ogd::{OgdState, StepSchedule};
