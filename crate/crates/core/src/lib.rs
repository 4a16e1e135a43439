//! Mutually unbiased bases, complex Hadamard matrices and numerical searches
//! for MU vectors.

pub mod analysis;
pub mod catalogue;
pub mod constructions;
pub mod error;
pub mod finite_algebra;
pub mod io;
pub mod numeric;
pub mod search;

pub use error::{Error, Result};
pub use numeric::{HadamardMatrix, MubSet, OrthonormalBasis, ToleranceProfile};
