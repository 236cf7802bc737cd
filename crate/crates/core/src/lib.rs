//! Lie point symmetries of the self-dual Yang-Mills equations in four
//! Euclidean dimensions.
//!
//! The crate builds the prolonged action of a generic point vector field on
//! the self-duality equations, extracts the determining equations by exact
//! coefficient collection, verifies closed-form symmetry generators against
//! them, recovers solution-space dimensions by polynomial ansatz, and checks
//! generators numerically on an instanton background.

pub mod algebra;
pub mod crosscheck;
pub mod error;
pub mod expr;
pub mod generator;
pub mod linalg;
pub mod numeric;
pub mod prolong;
pub mod replay;
pub mod scalar;
pub mod solver;
pub mod tensor;

pub use algebra::{GaugeAlgebra, LoadedAlgebra};
pub use error::{Error, Result};
pub use scalar::{Rat, Scalar};
