//! Rational approximation of Hardy-operator invariant subspaces.

pub mod context;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod json;
pub mod laguerre;
pub mod linalg;
pub mod mp;
pub mod pick;
pub mod pipeline;
pub mod poly;
pub mod rational;
pub mod scalar;

pub use context::Context;
pub use error::{Error, Result};
pub use mp::Mp;
pub use scalar::{Real, Scalar, C};

pub type Mp128 = Mp<128>;
pub type Mp256 = Mp<256>;
pub type Mp512 = Mp<512>;
pub type Exact = num_rational::BigRational;

pub use functions::{Exponent, LogMonomialSum, LogMonomialTerm};
