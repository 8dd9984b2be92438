//! The Ornstein–Uhlenbeck-type semigroup of a stable law and the Stein
//! equation it solves.

pub mod law;
pub mod solver;

pub use law::StandardGrid;
pub use solver::{
    derivative_bound_report, generator_apply, generator_limit_check, remainder_density,
    semigroup_apply, semigroup_law_check, solve_stein, SemigroupContext, SteinSolution,
    ALPHA_ONE_MESSAGE,
};
