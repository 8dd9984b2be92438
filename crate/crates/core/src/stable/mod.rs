//! Non-Gaussian stable laws and general Lévy measures.

pub mod cf;
pub mod density;
pub mod levy;
pub mod params;
pub mod sampler;

pub use cf::{cf_idd, cf_stable, cf_stable_closed, sd_ratio_cf, StableLaw};
pub use density::{density, StandardStable};
pub use levy::{stable_levy, tempered_cauchy_levy, uniform_jumps, IDDTriplet, IddType, LevySpec};
pub use params::{derive_params, DerivedParams, StableParams};
pub use sampler::{fractional_moment, sample, FractionalMoment};
