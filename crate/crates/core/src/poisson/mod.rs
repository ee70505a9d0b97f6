//! Differential polynomials in jet variables, a catalog of Poisson
//! structures, and the restriction of graph series to them.

mod eval;
mod jet;
mod structure;

use alloc::string::String;

use crate::coeffs::CoeffExpr;
use crate::graph::decode;
use crate::series::{GraphSum, SeriesError};

pub use eval::{evaluate, make_vanish, Evaluator, MultiIndex, PolyDiffOperator, VanishCollector};
pub use jet::{Jet, JetPoly, Monomial, MAX_DIM};
pub use structure::{catalog, PoissonStructure, CATALOG_NAMES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PoissonError {
    #[error("unknown Poisson structure {0:?}")]
    UnknownStructure(String),
    #[error("coefficient {0} is not a number; use make_vanish for symbolic input")]
    SymbolicCoefficient(String),
    #[error("a relation at h^{power} has no unknowns but equals {value}")]
    Inconsistent { power: u32, value: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The three-graph sum whose value at `P` is the Jacobiator of `P` acting on
/// three arguments.
pub fn jacobiator() -> GraphSum {
    let term = |s: &str, c: i64| (CoeffExpr::constant(crate::coeffs::Rational::from_integer(c)), decode(s).expect("valid encoding"));
    GraphSum::from_terms(alloc::vec![term("3 2 1 0 1 2 3", -1), term("3 2 1 0 2 1 3", 1), term("3 2 1 0 4 1 2", -1)])
}
