//! Exact construction of formal ACH-Einstein expansions over left-invariant
//! partially integrable CR structures, with the accompanying identity checks.

pub mod ach;
pub mod algebra;
pub mod error;
pub mod index;
pub mod linalg;
pub mod pseudohermitian;
pub mod registry;
pub mod report;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod sphere;
pub mod tensor;

pub use algebra::{CRFrameAlgebra, DeformationTensor};
pub use error::{Error, Result};
pub use index::{Alphabet, IndexKind, Kinds};
pub use scalar::Scalar;
pub use series::RhoSeries;
pub use tensor::{InvariantTensor, Pairing};
