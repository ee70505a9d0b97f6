//! Thread-parallel drivers for the expensive loops. Results do not depend
//! on the number of threads.

use kgraph_core::coeffs::CoeffExpr;
use kgraph_core::graph::KontsevichGraph;
use kgraph_core::poisson::{Evaluator, PoissonStructure, VanishCollector};
use kgraph_core::series::GraphSeries;
use kgraph_core::weightnum::{is_integrand_zero, monte_carlo_sums, MonteCarloSums};
use rayon::prelude::*;

use crate::Error;

/// Relations forcing the kept parts of `s` to vanish at `p`; see
/// [`kgraph_core::poisson::make_vanish`], which this parallelizes over terms.
pub fn make_vanish<F>(s: &GraphSeries, p: &PoissonStructure, keep: F) -> Result<Vec<CoeffExpr>, Error>
where
    F: Fn(u32, &[usize]) -> bool + Sync,
{
    let jobs: Vec<(u32, &CoeffExpr, &KontsevichGraph)> = s
        .powers()
        .flat_map(|(k, sum)| sum.terms().iter().map(move |(c, g)| (k, c, g)))
        .filter(|(k, c, g)| !c.is_zero() && keep(*k, &g.sink_in_degrees()))
        .collect();
    let collector = jobs
        .par_iter()
        .fold(
            || (Evaluator::new(p), VanishCollector::new()),
            |(mut ev, mut col), (k, c, g)| {
                let op = ev.graph(g);
                col.add(*k, c, &op);
                (ev, col)
            },
        )
        .map(|(_, col)| col)
        .reduce(VanishCollector::new, |mut a, b| {
            a.merge(b);
            a
        });
    Ok(collector.finish()?)
}

/// Number of independent random streams a Monte Carlo run is split into.
pub const MONTE_CARLO_STREAMS: u64 = 64;

/// Monte Carlo weight estimate `(mean, standard error)` over
/// [`MONTE_CARLO_STREAMS`] substreams of `seed`, merged in stream order.
pub fn monte_carlo_weight(g: &KontsevichGraph, samples: u64, seed: u64) -> Result<(f64, f64), Error> {
    let per = samples / MONTE_CARLO_STREAMS;
    let extra = samples % MONTE_CARLO_STREAMS;
    let parts = (0..MONTE_CARLO_STREAMS)
        .into_par_iter()
        .map(|i| monte_carlo_sums(g, per + u64::from(i < extra), seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = MonteCarloSums::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.estimate())
}

/// Zero-integrand flags for many graphs, in input order.
pub fn zero_integrands(graphs: &[KontsevichGraph], trials: usize, seed: u64) -> Result<Vec<bool>, Error> {
    graphs
        .par_iter()
        .map(|g| Ok(is_integrand_zero(g, trials, seed)?))
        .collect()
}
