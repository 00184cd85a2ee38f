pub mod classical;
pub mod error;
pub mod matrix;
pub mod opmatrix;
pub mod rep;
pub mod report;
pub mod rmatrix;
pub mod scalar;
pub mod suite;
pub mod tensorop;
pub mod wigner;

pub use error::{Error, Result};
pub use scalar::{Backend, BackendKind, Exact, Laurent, Numeric, QContext, Scalar};
