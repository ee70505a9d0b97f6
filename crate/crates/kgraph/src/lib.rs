//! File formats, parallel drivers and the command-line front end for the
//! Kontsevich graph calculus implemented in `kgraph-core`.

pub mod cli;
pub mod dump;
pub mod io;
pub mod parallel;

use kgraph_core::coeffs::CoeffError;
use kgraph_core::graph::GraphError;
use kgraph_core::leibniz::LeibnizError;
use kgraph_core::linsolve::LinsolveError;
use kgraph_core::poisson::PoissonError;
use kgraph_core::series::SeriesError;
use kgraph_core::star::StarError;
use kgraph_core::weightnum::WeightError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Linsolve(#[from] LinsolveError),
    #[error(transparent)]
    Leibniz(#[from] LeibnizError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}
