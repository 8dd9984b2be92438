//! Stein operators and Monte Carlo checks of the characterizing identity.

pub mod identity;
pub mod operators;
pub mod test_function;

pub use identity::{stein_identity_mc, Target, TabulatedOperator};
pub use operators::{
    apply_gaussian, apply_stable, apply_symmetric, apply_type_a, apply_type_b, apply_type_c,
    StableOperator, SteinOpResult,
};
pub use test_function::{standard_dictionary, DecayClass, TestFunction};
