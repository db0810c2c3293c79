//! Where the types come from: per-period distributions, piecewise-stationary
//! schedules, corruption of realized types, predicted schedules and the
//! two-scenario lower-bound instances.

pub mod constructions;
pub mod corruption;
pub mod distribution;
pub mod prediction;
pub mod schedule;

pub use corruption::{apply_corruption, corrupted_groups, CorruptedHorizon, CorruptionPlan, CorruptionRule, PeriodSelection};
pub use distribution::{clamped_normal_mean, Distribution};
pub use prediction::{period_inaccuracy, prediction_inaccuracy, PredictionSchedule};
pub use schedule::{EnvironmentSchedule, Segment};
