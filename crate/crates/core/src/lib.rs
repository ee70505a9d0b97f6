//! Exact Kontsevich graph calculus.
//!
//! Graphs and their normal forms, truncated graph series, the star product
//! assembled from graph weights, evaluation at Poisson structures, exact
//! linear solving of weight relations, Leibniz-graph factorization and
//! numeric weight integrands. Everything here is `no_std` with `alloc`;
//! file handling and the command line live in the companion `kgraph` crate.

#![no_std]

extern crate alloc;

pub mod coeffs;
pub mod graph;
pub mod series;
pub mod leibniz;
pub mod linsolve;
pub mod poisson;
pub mod star;
pub mod weightnum;
