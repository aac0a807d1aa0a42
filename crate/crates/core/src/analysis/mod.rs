//! One-dimensional profile analysis.

pub mod concavity;
pub mod convolution;
pub mod kbound;
pub mod sliding;
pub mod spectral;
pub mod variation;

pub use concavity::{concavity_check, ConcavityReport};
pub use convolution::convolution_identity_check;
pub use kbound::{k_upper, KBound, KEstimator, KStrategy};
pub use sliding::{sliding_integral, sliding_value, MomentTable};
pub use spectral::{ac_diagnostic, SpectralReport};
pub use variation::variation_and_derivative;
