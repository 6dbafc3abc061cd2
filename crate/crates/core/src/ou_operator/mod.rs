//! The OU operator on polynomials: Galerkin matrix, Mehler semigroup,
//! Wiener chaos projections, and a path sampler.

pub mod chaos;
pub mod galerkin;
pub mod mehler;
pub mod moments;
pub mod poly;
pub mod semigroup;
pub mod sde;

pub use chaos::{chaos_decomposition, ChaosDecomposition};
pub use galerkin::{assemble_l, galerkin_spectrum};
pub use mehler::{mehler_apply, mehler_matrix};
pub use poly::{PolyBasis, Polynomial};
pub use semigroup::{verify_second_quantization, SecondQuantizationReport};
pub use sde::{simulate_paths, PathStats};
