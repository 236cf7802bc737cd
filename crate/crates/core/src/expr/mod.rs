//! Exact polynomial algebra over coordinates, fields, jets and unknowns.

pub mod jet;
pub mod poly;
pub mod symbol;

pub use jet::{collect, substitute_sdym, IndependentPairs, JetBasis};
pub use poly::{Expr, Expression, Monomial};
pub use symbol::{AuxFn, Symbol};
