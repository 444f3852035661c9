use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The working precision cannot resolve the problem.
    #[error("ill-conditioned {what} at {bits} bits; about {needed_bits} bits required")]
    IllConditioned { what: String, bits: u32, needed_bits: u32 },

    #[error("scaling constant unbounded: every moment vanishes")]
    ScalingUnbounded,

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    /// The rational symbol vanishes at s = -1, so no pole sits at -1.
    #[error("symbol vanishes at s = -1: {0}")]
    VanishingAtMinusOne(String),

    #[error("degenerate subspace: {0}")]
    DegenerateSubspace(String),

    #[error("root finder did not converge for degree {degree} at {bits} bits")]
    NoConvergence { degree: usize, bits: u32 },

    #[error("space appears dense: e_0..e_{k_max} all lie in it")]
    SpaceAppearsDense { k_max: usize },

    #[error("partial-fraction residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Residual { residual: f64, tol: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Precision problems are recoverable by re-running at more bits.
    pub fn is_precision_related(&self) -> bool {
        matches!(self, Error::IllConditioned { .. } | Error::NoConvergence { .. })
    }
}
