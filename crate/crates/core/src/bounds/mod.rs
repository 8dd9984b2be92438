//! Approximation bounds for normalized sums, the kernels they are built
//! from, and empirical distances to compare them with.

pub mod dna;
pub mod identities;
pub mod kernels;
pub mod report;
pub mod transport;
pub mod w2;
pub mod wdelta;

pub use dna::{normalized_sums, sample_dna, DnaSpec};
pub use identities::{kernel_decomposition_check, sum_kernel_identity_mc, IdentityCheck, SumKernelCheck, scaling_identity_check};
pub use kernels::{kernel_ki, kernel_knu, levy_abs_tail, truncated_second_moment};
pub use report::{calibrate, BoundReport, BoundTerm, Constant, ConstantsPolicy};
pub use transport::{empirical_w2h, empirical_wdelta, w2h_dictionary, TransportDistance, W2Dictionary};
pub use w2::{bound_w2, TwoPointLaw};
pub use wdelta::{bound_wdelta, perturbation_integrals};
