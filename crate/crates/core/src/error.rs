use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OuError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("diffusion matrix is not symmetric (max |Q - Q^T| = {0:e})")]
    AsymmetricQ(f64),
    #[error("diffusion matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPSD(f64),
    #[error("eigensolver did not converge")]
    EigFailure,
    #[error("matrix exponential produced non-finite entries")]
    ExpmFailure,
    #[error("drift is not uniformly exponentially stable (spectral abscissa {0:e})")]
    Unstable(f64),
    #[error("range of Q_inf is not invariant under e^(tA) (residual {0:e})")]
    RangeNotInvariant(f64),
    #[error("strong Feller criteria disagree: rank(Q_t) = {gramian_rank}, Kalman rank = {kalman_rank}")]
    CriteriaDisagree { gramian_rank: usize, kalman_rank: usize },
    #[error("matrix side {requested} exceeds the size cap {cap}")]
    SizeCap { requested: usize, cap: usize },
    #[error("operator norm {0} exceeds 1; second quantization needs a contraction")]
    NotContraction(f64),
    #[error("enumeration of {requested} points exceeds the cap {cap}")]
    EnumCap { requested: usize, cap: usize },
    #[error("lattice enumeration needs Re z < 0 for every generator, got {0}")]
    NonStableInput(String),
    #[error("Hausdorff distance of an empty set")]
    EmptySet,
    #[error("invariant measure is degenerate (rank {rank} < dimension {dim})")]
    DegenerateMeasure { rank: usize, dim: usize },
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl OuError {
    /// True for errors caused by malformed input rather than a failed
    /// numerical hypothesis.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            OuError::DimensionMismatch(_)
                | OuError::AsymmetricQ(_)
                | OuError::NotPSD(_)
                | OuError::SizeCap { .. }
                | OuError::NotContraction(_)
                | OuError::EnumCap { .. }
                | OuError::InvalidStep(_)
                | OuError::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, OuError>;
