//! Shared numerical kernels.

pub mod fourier;
pub mod interp;
pub mod oscillatory;
pub mod parallel;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use fourier::{fourier_invert, GridSpec, SampledFunction};
pub use interp::CubicSpline;
pub use quadrature::{integrate, integrate_with_error, Estimate, QuadratureSpec};
pub use rng::{normal_stream, uniform_stream, RngStream};
pub use stats::{MCEstimate, Welford};
