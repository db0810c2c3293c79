//! Online two-stage stochastic optimization with long-term constraints.
//!
//! The crate is organised around six pieces:
//!
//! - [`problem`]: the two-stage family interface and the resource-allocation
//!   family used by the benchmark suites.
//! - [`learners`]: online gradient descent, Hedge and EXP3 as plain state
//!   machines.
//! - [`solvers`]: the per-period inner solve with its first-stage
//!   subgradient, a dense simplex, the fluid (expectation) relaxation and the
//!   prediction-informed saddle solve.
//! - [`algorithms`]: the doubly adversarial (DAL) and informative adversarial
//!   (IAL) run loops producing [`RunTrace`](algorithms::RunTrace)s.
//! - [`environments`]: demand schedules, corruption plans, predictions and
//!   the lower-bound scenario constructions.
//! - [`bench`]: experiment configuration, metrics, CSV/SVG output and the
//!   reproduction suites.
//!
//! Every quantity the learners see is normalized through the family's
//! [`ScaleBounds`](problem::ScaleBounds); traces and metrics are reported in
//! raw units.

pub mod algorithms;
pub mod bench;
pub mod environments;
mod error;
pub mod learners;
pub mod problem;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
