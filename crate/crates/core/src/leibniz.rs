//! Leibniz graphs: Kontsevich graphs in which some vertex pairs stand for a
//! copy of the Jacobiator, and the search for a combination of them equal to
//! a given graph series.
//!
//! A Leibniz graph with `ℓ` Jacobiators on `m` sinks and `n` internal
//! vertices is stored as an ordinary encoding. With `N = m + n`, Jacobiator
//! `j` occupies the vertex pair `(N-2ℓ+2j, N-2ℓ+2j+1)`: the lower vertex
//! sends its edges to the first two arguments, the upper vertex sends its
//! left edge to the lower vertex and its right edge to the third argument.
//! Any other edge that targets `N-2ℓ+j` refers to Jacobiator `j` as a whole
//! and is distributed over its two vertices by the Leibniz rule.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};
use rand::Rng;

use crate::coeffs::{CoeffExpr, Rational, Symbol};
use crate::graph::{KontsevichGraph, Vertex};
use crate::linsolve::LinearSystem;
use crate::series::{Accumulator, GraphSeries, GraphSum, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LeibnizError {
    #[error("a Leibniz graph needs at least one Jacobiator")]
    NoJacobiator,
    #[error("{jacobiators} Jacobiators need {needed} internal vertices, found {found}")]
    TooFewVertices { jacobiators: usize, needed: usize, found: usize },
    #[error("upper vertex of Jacobiator {0} must point to its lower vertex")]
    BrokenPattern(usize),
    #[error("Jacobiator {0} needs three distinct arguments other than itself")]
    BadArguments(usize),
    #[error("edge target {0} is a Jacobiator vertex, not a placeholder")]
    TargetOutOfRange(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LeibnizGraph {
    graph: KontsevichGraph,
    jacobiators: usize,
}

impl LeibnizGraph {
    pub fn new(graph: KontsevichGraph, jacobiators: usize) -> Result<Self, LeibnizError> {
        let l = jacobiators;
        if l == 0 {
            return Err(LeibnizError::NoJacobiator);
        }
        let n = graph.internal();
        if n < 2 * l {
            return Err(LeibnizError::TooFewVertices {
                jacobiators: l,
                needed: 2 * l,
                found: n,
            });
        }
        let lg = LeibnizGraph { graph, jacobiators };
        let limit = lg.reference_limit();
        let t = lg.graph.targets();
        for v in 0..lg.diamond_count() {
            for &x in &t[v] {
                if x as usize >= limit {
                    return Err(LeibnizError::TargetOutOfRange(x as usize));
                }
            }
        }
        for j in 0..l {
            let lower = lg.lower(j);
            if t[lg.pos(lower + 1)][0] as usize != lower {
                return Err(LeibnizError::BrokenPattern(j));
            }
            let [a, b, c] = lg.arguments(j);
            let own = lg.placeholder(j);
            let ok = [a, b, c].iter().all(|&x| x < limit && x != own) && a != b && b != c && a != c;
            if !ok {
                return Err(LeibnizError::BadArguments(j));
            }
        }
        Ok(lg)
    }

    pub fn graph(&self) -> &KontsevichGraph {
        &self.graph
    }

    pub fn jacobiators(&self) -> usize {
        self.jacobiators
    }

    /// Internal vertices outside the Jacobiators.
    pub fn diamond_count(&self) -> usize {
        self.graph.internal() - 2 * self.jacobiators
    }

    fn total(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Targets at or above this index are never valid edge endpoints.
    fn reference_limit(&self) -> usize {
        self.total() - self.jacobiators
    }

    fn placeholder(&self, j: usize) -> usize {
        self.total() - 2 * self.jacobiators + j
    }

    fn lower(&self, j: usize) -> usize {
        self.total() - 2 * self.jacobiators + 2 * j
    }

    fn pos(&self, vertex: usize) -> usize {
        vertex - self.graph.sinks()
    }

    /// Arguments `(a, b, c)` of Jacobiator `j`, as vertex or placeholder indices.
    pub fn arguments(&self, j: usize) -> [usize; 3] {
        let t = self.graph.targets();
        let lo = self.pos(self.lower(j));
        [t[lo][0] as usize, t[lo][1] as usize, t[lo + 1][1] as usize]
    }

    /// Number of edges landing on each sink, counting Jacobiator arguments.
    pub fn sink_in_degrees(&self) -> Vec<usize> {
        self.graph.sink_in_degrees()
    }

    /// Number of edges referring to each Jacobiator.
    pub fn jacobiator_in_degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0; self.jacobiators];
        let base = self.placeholder(0);
        let mut count = |x: usize| {
            if (base..base + self.jacobiators).contains(&x) {
                deg[x - base] += 1;
            }
        };
        for v in 0..self.diamond_count() {
            for &x in &self.graph.targets()[v] {
                count(x as usize);
            }
        }
        for j in 0..self.jacobiators {
            for x in self.arguments(j) {
                count(x);
            }
        }
        deg
    }

    /// All Kontsevich graphs of the expansion, each with coefficient 1, in
    /// a fixed order: cyclic rotations of the Jacobiator arguments (the
    /// first Jacobiator varying slowest), then every way of sending each
    /// edge on a Jacobiator to its lower or its upper vertex.
    pub fn expand_terms(&self) -> Vec<KontsevichGraph> {
        let l = self.jacobiators;
        let base = self.placeholder(0);
        let first_lower = self.lower(0);
        let mut out = Vec::new();
        let mut rot = alloc::vec![0usize; l];
        let sizes = alloc::vec![3usize; l];
        loop {
            let mut t: Vec<[Vertex; 2]> = self.graph.targets().to_vec();
            for (j, &r) in rot.iter().enumerate() {
                let mut args = self.arguments(j);
                args.rotate_left(r);
                let lo = self.pos(self.lower(j));
                t[lo] = [args[0] as Vertex, args[1] as Vertex];
                t[lo + 1] = [self.lower(j) as Vertex, args[2] as Vertex];
            }
            let mut slots: Vec<(usize, usize)> = Vec::new();
            for (v, pair) in t.iter().enumerate() {
                for side in 0..2 {
                    let structural = v >= self.diamond_count() && (v - self.diamond_count()) % 2 == 1 && side == 0;
                    if !structural && (base..base + l).contains(&(pair[side] as usize)) {
                        slots.push((v, side));
                    }
                }
            }
            let s = slots.len();
            for mask in 0u32..(1 << s) {
                let mut u = t.clone();
                for (i, &(v, side)) in slots.iter().enumerate() {
                    let j = t[v][side] as usize - base;
                    let bit = (mask >> (s - 1 - i)) & 1;
                    u[v][side] = (first_lower + 2 * j + bit as usize) as Vertex;
                }
                out.push(KontsevichGraph::from_parts(self.graph.sinks(), self.graph.sign(), u));
            }
            if !advance(&mut rot, &sizes) {
                return out;
            }
        }
    }

    /// The expansion reduced modulo skew-symmetry.
    pub fn expand(&self) -> GraphSum {
        let mut acc = Accumulator::new();
        let one = CoeffExpr::one();
        for g in self.expand_terms() {
            acc.add(&one, &g);
        }
        acc.finish()
    }

    /// A uniformly drawn valid Leibniz graph with `n` internal vertices of
    /// which `2ℓ` form Jacobiators; diamond vertices avoid tadpoles.
    pub fn random<R: Rng + ?Sized>(m: usize, n: usize, l: usize, rng: &mut R) -> LeibnizGraph {
        assert!(l >= 1 && n >= 2 * l && m + n <= crate::graph::MAX_VERTICES);
        let total = m + n;
        let limit = total - l;
        let d = n - 2 * l;
        let mut t: Vec<[Vertex; 2]> = Vec::with_capacity(n);
        for v in 0..d {
            let own = m + v;
            let pick = |rng: &mut R| loop {
                let x = rng.random_range(0..limit);
                if x != own {
                    return x as Vertex;
                }
            };
            let a = pick(rng);
            let b = loop {
                let b = pick(rng);
                if b != a {
                    break b;
                }
            };
            t.push([a, b]);
        }
        for j in 0..l {
            let own = total - 2 * l + j;
            let mut args: Vec<Vertex> = Vec::new();
            while args.len() < 3 {
                let x = rng.random_range(0..limit);
                if x != own && !args.contains(&(x as Vertex)) {
                    args.push(x as Vertex);
                }
            }
            let lower = (total - 2 * l + 2 * j) as Vertex;
            t.push([args[0], args[1]]);
            t.push([lower, args[2]]);
        }
        let g = KontsevichGraph::from_parts(m, 1, t);
        LeibnizGraph::new(g, l).expect("constructed valid")
    }
}

impl fmt::Display for LeibnizGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.graph.fmt(f)
    }
}

/// Candidate Leibniz graphs on `m` sinks with `n` internal vertices, at
/// most `max_jacobiators` Jacobiators each receiving at most
/// `max_indegree` edges, and no tadpoles or double edges at the other
/// vertices. Jacobiator arguments are taken in increasing order, since
/// reordering them only changes the sign. `keep` sees the sink in-degrees
/// and can reject a candidate before it is expanded.
///
/// Candidates whose expansion vanishes, or equals an earlier one up to a
/// rational factor, are dropped.
pub fn generate_leibniz<F>(m: usize, n: usize, max_jacobiators: usize, max_indegree: usize, mut keep: F) -> Vec<LeibnizGraph>
where
    F: FnMut(&[usize]) -> bool,
{
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<(KontsevichGraph, Rational)>> = HashSet::new();
    let total = m + n;
    for l in 1..=max_jacobiators {
        if 2 * l > n {
            break;
        }
        let d = n - 2 * l;
        let limit = total - l;
        let pair_choices: Vec<Vec<[Vertex; 2]>> = (0..d)
            .map(|v| {
                let own = m + v;
                let mut c = Vec::new();
                for a in 0..limit {
                    for b in 0..limit {
                        if a != b && a != own && b != own {
                            c.push([a as Vertex, b as Vertex]);
                        }
                    }
                }
                c
            })
            .collect();
        let arg_choices: Vec<Vec<[Vertex; 3]>> = (0..l)
            .map(|j| {
                let own = total - 2 * l + j;
                let mut c = Vec::new();
                for a in 0..limit {
                    for b in a + 1..limit {
                        for x in b + 1..limit {
                            if a != own && b != own && x != own {
                                c.push([a as Vertex, b as Vertex, x as Vertex]);
                            }
                        }
                    }
                }
                c
            })
            .collect();
        let sizes: Vec<usize> = pair_choices.iter().map(Vec::len).chain(arg_choices.iter().map(Vec::len)).collect();
        if sizes.contains(&0) {
            continue;
        }
        let mut idx = alloc::vec![0usize; sizes.len()];
        loop {
            let mut t: Vec<[Vertex; 2]> = (0..d).map(|v| pair_choices[v][idx[v]]).collect();
            for j in 0..l {
                let [a, b, c] = arg_choices[j][idx[d + j]];
                t.push([a, b]);
                t.push([(total - 2 * l + 2 * j) as Vertex, c]);
            }
            let lg = LeibnizGraph {
                graph: KontsevichGraph::from_parts(m, 1, t),
                jacobiators: l,
            };
            if lg.jacobiator_in_degrees().iter().all(|&k| k <= max_indegree) && keep(&lg.sink_in_degrees()) {
                let e = lg.expand();
                if let Some((lead, _)) = e.terms().first() {
                    let inv = lead.as_constant().expect("numeric").recip().expect("nonzero");
                    let key: Vec<_> = e
                        .terms()
                        .iter()
                        .map(|(c, g)| (g.clone(), c.as_constant().expect("numeric") * &inv))
                        .collect();
                    if seen.insert(key) {
                        out.push(lg);
                    }
                }
            }
            if !advance(&mut idx, &sizes) {
                break;
            }
        }
    }
    out
}

/// Steps a mixed-radix counter, last digit fastest; false after the last value.
fn advance(idx: &mut [usize], sizes: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < sizes[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// A factorization of one power of a series through Leibniz graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// `(name, graph, coefficient)` for every nonzero coefficient.
    pub terms: Vec<(String, LeibnizGraph, CoeffExpr)>,
    /// Values forced on the series' own indeterminates.
    pub unknowns: BTreeMap<Symbol, CoeffExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    Factorized(Factorization),
    /// What remains of the series after removing everything the
    /// candidates can produce.
    Residual(GraphSum),
}

/// Name `c_<ℓ>_<index>_<sink in-degrees>` of a candidate.
pub fn coefficient_name(lg: &LeibnizGraph, index: usize) -> String {
    let degrees: String = lg.sink_in_degrees().iter().map(|d| d.to_string()).collect();
    alloc::format!("c_{}_{}_{}", lg.jacobiators(), index, degrees)
}

fn graph_symbol(g: &KontsevichGraph) -> Symbol {
    Symbol::from(g.to_string())
}

/// Tries to write each nonempty power `S_k` of a three-sink series as
/// `Σ c_i·expand(L_i)` over Leibniz graphs with `k` internal vertices.
///
/// With `solve_unknowns`, indeterminates in the coefficients of `S` join the
/// linear system and are kept free where possible. Free `c_i` are set to 0.
pub fn reduce_mod_jacobi(
    s: &GraphSeries,
    max_jacobiators: usize,
    max_indegree: usize,
    solve_unknowns: bool,
) -> Result<BTreeMap<u32, Reduction>, SeriesError> {
    let mut out = BTreeMap::new();
    for (k, sum) in s.powers() {
        let target = sum.reduce_mod_skew()?;
        if target.is_empty() {
            continue;
        }
        let m = target.sinks()?.unwrap_or(0);
        let degrees: BTreeSet<Vec<usize>> = target.terms().iter().map(|(_, g)| g.sink_in_degrees()).collect();
        let candidates = generate_leibniz(m, k as usize, max_jacobiators, max_indegree, |d| degrees.contains(d));
        let expansions: Vec<GraphSum> = candidates.iter().map(LeibnizGraph::expand).collect();
        let names: Vec<Symbol> = candidates.iter().enumerate().map(|(i, lg)| Symbol::from(coefficient_name(lg, i + 1))).collect();
        let series_names: BTreeSet<Symbol> = target.names().into_iter().collect();
        let mut rows: HashMap<KontsevichGraph, CoeffExpr> = HashMap::new();
        let mut order: Vec<KontsevichGraph> = Vec::new();
        let mut row = |g: &KontsevichGraph, rows: &mut HashMap<KontsevichGraph, CoeffExpr>| {
            if !rows.contains_key(g) {
                order.push(g.clone());
                rows.insert(g.clone(), CoeffExpr::zero());
            }
        };
        for (c, g) in target.terms() {
            row(g, &mut rows);
            rows.get_mut(g).expect("present").add_scaled(c, &Rational::from_integer(-1));
        }
        for (name, e) in names.iter().zip(&expansions) {
            for (c, g) in e.terms() {
                row(g, &mut rows);
                let c = c.as_constant().expect("numeric expansion");
                rows.get_mut(g).expect("present").add_term(name, c);
            }
        }
        let equations: Vec<CoeffExpr> = order.iter().map(|g| rows[g].clone()).collect();
        let system = LinearSystem::new(equations).with_preferred_free(series_names.iter().cloned());
        let reduction = match system.solve() {
            Ok(sol) if solve_unknowns || sol.solved.keys().all(|n| !series_names.contains(n)) => {
                let zero_free: BTreeMap<Symbol, CoeffExpr> = sol
                    .free
                    .iter()
                    .filter(|n| !series_names.contains(*n))
                    .map(|n| (n.clone(), CoeffExpr::zero()))
                    .collect();
                let mut terms = Vec::new();
                for (name, lg) in names.iter().zip(&candidates) {
                    if let Some(v) = sol.solved.get(name) {
                        let v = v.substitute_map(&zero_free);
                        if !v.is_zero() {
                            terms.push((name.to_string(), lg.clone(), v));
                        }
                    }
                }
                let unknowns = sol
                    .solved
                    .iter()
                    .filter(|(n, _)| series_names.contains(*n))
                    .map(|(n, v)| (n.clone(), v.substitute_map(&zero_free)))
                    .collect();
                Reduction::Factorized(Factorization { terms, unknowns })
            }
            _ => Reduction::Residual(residual(&target, &expansions)?),
        };
        out.insert(k, reduction);
    }
    Ok(out)
}

/// `target` reduced by the span of `expansions`, with graphs as the
/// coordinates. Zero exactly when `target` lies in the span.
fn residual(target: &GraphSum, expansions: &[GraphSum]) -> Result<GraphSum, SeriesError> {
    let as_expr = |sum: &GraphSum| -> CoeffExpr {
        let mut e = CoeffExpr::zero();
        for (c, g) in sum.terms() {
            if let Some(c) = c.as_constant() {
                e.add_term(&graph_symbol(g), c);
            }
        }
        e
    };
    let system = LinearSystem::new(expansions.iter().map(as_expr).collect());
    let sol = system.solve().expect("homogeneous system is consistent");
    let lookup: HashMap<Symbol, &KontsevichGraph> = target
        .terms()
        .iter()
        .map(|(_, g)| g)
        .chain(expansions.iter().flat_map(|e| e.terms().iter().map(|(_, g)| g)))
        .map(|g| (graph_symbol(g), g))
        .collect();
    let reduced = as_expr(target).substitute_map(&sol.solved);
    let mut acc = Accumulator::new();
    for (name, c) in reduced.terms() {
        acc.add_normal(&CoeffExpr::constant(c.clone()), lookup[name]);
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::decode;
    use crate::poisson::jacobiator;
    use rand::SeedableRng;

    fn lg(s: &str, l: usize) -> LeibnizGraph {
        LeibnizGraph::new(decode(s).unwrap(), l).unwrap()
    }

    #[test]
    fn example_expansion() {
        let terms: Vec<String> = lg("3 5 1 0 5 3 6 3 4 3 1 6 2", 1).expand_terms().iter().map(|g| g.to_string()).collect();
        assert_eq!(
            terms,
            [
                "3 5 1 0 5 3 6 3 4 3 1 6 2",
                "3 5 1 0 5 3 7 3 4 3 1 6 2",
                "3 5 1 0 5 3 6 3 4 1 2 6 3",
                "3 5 1 0 5 3 7 3 4 1 2 6 3",
                "3 5 1 0 5 3 6 3 4 2 3 6 1",
                "3 5 1 0 5 3 7 3 4 2 3 6 1",
            ]
        );
    }

    #[test]
    fn bare_jacobiator_matches_the_jacobiator_sum() {
        let bare = lg("3 2 1 0 1 3 2", 1);
        assert_eq!(bare.expand_terms().len(), 3);
        assert_eq!(bare.expand(), jacobiator().reduce_mod_skew().unwrap());
    }

    #[test]
    fn validation() {
        let g = decode("3 2 1 0 1 3 2").unwrap();
        assert_eq!(LeibnizGraph::new(g.clone(), 0), Err(LeibnizError::NoJacobiator));
        assert!(matches!(LeibnizGraph::new(g, 2), Err(LeibnizError::TooFewVertices { .. })));
        assert_eq!(LeibnizGraph::new(decode("3 2 1 0 1 4 2").unwrap(), 1), Err(LeibnizError::BrokenPattern(0)));
        assert_eq!(LeibnizGraph::new(decode("3 2 1 0 0 3 2").unwrap(), 1), Err(LeibnizError::BadArguments(0)));
        assert_eq!(LeibnizGraph::new(decode("3 3 1 5 1 0 1 4 2").unwrap(), 1), Err(LeibnizError::TargetOutOfRange(5)));
        assert!(LeibnizGraph::new(decode("3 3 1 4 1 0 1 4 2").unwrap(), 1).is_ok());
    }

    #[test]
    fn random_graphs_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let l = rng.random_range(1..=2);
            let n = rng.random_range(2 * l..=4);
            let g = LeibnizGraph::random(3, n, l, &mut rng);
            assert!(LeibnizGraph::new(g.graph().clone(), l).is_ok());
        }
    }

    #[test]
    fn order_two_factorization() {
        let mut powers = BTreeMap::new();
        powers.insert(2, jacobiator().scale(&Rational::new(2, 3)));
        let s = GraphSeries::from_powers(powers);
        let r = reduce_mod_jacobi(&s, 1, 0, false).unwrap();
        match &r[&2] {
            Reduction::Factorized(f) => {
                assert_eq!(f.terms.len(), 1);
                assert_eq!(f.terms[0].1.to_string(), "3 2 1 0 1 3 2");
                assert_eq!(f.terms[0].2.to_string(), "2/3");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_vanishing_input_leaves_a_residual() {
        let mut powers = BTreeMap::new();
        powers.insert(2, GraphSum::single(CoeffExpr::one(), decode("3 2 1 0 1 2 3").unwrap()));
        let r = reduce_mod_jacobi(&GraphSeries::from_powers(powers), 1, 0, false).unwrap();
        match &r[&2] {
            Reduction::Residual(res) => assert!(!res.is_empty()),
            other => panic!("{other:?}"),
        }
    }
}
