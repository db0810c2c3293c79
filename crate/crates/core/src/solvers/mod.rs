pub mod fluid;
pub mod inner;
pub mod saddle;
pub mod simplex;

pub use fluid::{fluid_opt, FluidSettings, FluidSolution, GroupPlan, SampleGroup};
pub use inner::{
    constraint_feedback, inner_solve, lagrangian_at, prices_for, single_period_lagrangian, InnerSolution,
    LagrangianPoint,
};
pub use saddle::{saddle_solve, SaddleSettings, SaddleSolution};
