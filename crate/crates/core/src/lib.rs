//! Finite-dimensional Ornstein-Uhlenbeck operators: Gramians, the restricted
//! drift semigroup on the Cameron-Martin space, symmetric Fock space
//! machinery, and numerical checks of the lattice formula for the spectrum
//! of `L f = 1/2 Tr(Q D^2 f) + <Ax, Df>`.

pub mod config;
pub mod error;
pub mod gramian;
pub mod linalg;
pub mod ou_operator;
pub mod spectra;
pub mod tensor_fock;
pub mod verify;

pub use config::{TolProfile, Tolerances};
pub use error::{OuError, Result};
pub use gramian::OUModel;
pub use spectra::{LatticeWindow, SpectrumSet};
