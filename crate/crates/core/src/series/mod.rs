//! Formal sums and truncated power series of weighted graphs.

mod insert;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::coeffs::{CoeffError, CoeffExpr, Rational, Symbol, Target};
use crate::graph::{for_each_permutation, KontsevichGraph};

pub use insert::{insert_graphs, insert_series};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("mixed sink counts {0} and {1} in one sum")]
    MixedSinks(usize, usize),
    #[error("expected {expected} arguments, got {found}")]
    ArgumentCount { expected: usize, found: usize },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Formal sum of graphs with affine coefficients, all on the same sinks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphSum {
    terms: Vec<(CoeffExpr, KontsevichGraph)>,
}

impl GraphSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<(CoeffExpr, KontsevichGraph)>) -> Self {
        GraphSum { terms }
    }

    pub fn single(c: CoeffExpr, g: KontsevichGraph) -> Self {
        GraphSum {
            terms: alloc::vec![(c, g)],
        }
    }

    pub fn push(&mut self, c: CoeffExpr, g: KontsevichGraph) {
        self.terms.push((c, g));
    }

    pub fn terms(&self) -> &[(CoeffExpr, KontsevichGraph)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(CoeffExpr, KontsevichGraph)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common sink count, if the sum is nonempty.
    pub fn sinks(&self) -> Result<Option<usize>, SeriesError> {
        let mut m = None;
        for (_, g) in &self.terms {
            match m {
                None => m = Some(g.sinks()),
                Some(k) if k != g.sinks() => return Err(SeriesError::MixedSinks(k, g.sinks())),
                _ => {}
            }
        }
        Ok(m)
    }

    /// Normal forms with sign +1, like graphs merged, zero graphs and zero
    /// coefficients dropped, terms sorted by graph.
    pub fn reduce_mod_skew(&self) -> Result<GraphSum, SeriesError> {
        self.sinks()?;
        let mut acc = Accumulator::new();
        for (c, g) in &self.terms {
            acc.add(c, g);
        }
        Ok(acc.finish())
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coefficients<F: FnMut(&CoeffExpr) -> CoeffExpr>(&self, mut f: F) -> GraphSum {
        GraphSum {
            terms: self
                .terms
                .iter()
                .filter_map(|(c, g)| {
                    let c = f(c);
                    (!c.is_zero()).then(|| (c, g.clone()))
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> GraphSum {
        self.map_coefficients(|e| e.scale(c))
    }

    /// Sum over all sink permutations with their signs, reduced.
    pub fn skew_symmetrize(&self) -> Result<GraphSum, SeriesError> {
        let mut acc = Accumulator::new();
        let Some(m) = self.sinks()? else {
            return Ok(GraphSum::new());
        };
        let neg = Rational::from_integer(-1);
        for_each_permutation(m, |perm| {
            let odd = permutation_is_odd(perm);
            for (c, g) in &self.terms {
                let h = g.permute_sinks(perm);
                if odd {
                    acc.add(&c.scale(&neg), &h);
                } else {
                    acc.add(c, &h);
                }
            }
        });
        Ok(acc.finish())
    }

    /// Every indeterminate occurring in a coefficient.
    pub fn names(&self) -> Vec<Symbol> {
        crate::coeffs::collect_names(self.terms.iter().map(|(c, _)| c))
    }
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// Collects terms under their normal forms, merging like graphs.
#[derive(Default)]
pub struct Accumulator {
    map: HashMap<KontsevichGraph, CoeffExpr>,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c·g` after normalizing `g`.
    pub fn add(&mut self, c: &CoeffExpr, g: &KontsevichGraph) {
        if c.is_zero() {
            return;
        }
        let nf = g.normal_form();
        match nf.sign() {
            0 => {}
            s => self.add_normalized(c, nf.with_sign(1), s),
        }
    }

    /// Adds `c·g` for a graph already in normal form, including its sign.
    pub fn add_normal(&mut self, c: &CoeffExpr, nf: &KontsevichGraph) {
        match nf.sign() {
            0 => {}
            1 => self.add_normalized(c, nf.clone(), 1),
            s => self.add_normalized(c, nf.with_sign(1), s),
        }
    }

    fn add_normalized(&mut self, c: &CoeffExpr, key: KontsevichGraph, sign: i8) {
        let scale = Rational::from_integer(sign as i64);
        self.map
            .entry(key)
            .and_modify(|e| e.add_scaled(c, &scale))
            .or_insert_with(|| if sign == 1 { c.clone() } else { c.scale(&scale) });
    }

    pub fn merge(&mut self, other: Accumulator) {
        for (g, c) in other.map {
            self.add_normalized(&c, g, 1);
        }
    }

    pub fn finish(self) -> GraphSum {
        let mut terms: Vec<_> = self
            .map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| (c, g))
            .collect();
        terms.sort_by(|a, b| graph_order(&a.1, &b.1));
        GraphSum { terms }
    }
}

/// Canonical output order: by internal vertex count, then target list.
pub fn graph_order(a: &KontsevichGraph, b: &KontsevichGraph) -> core::cmp::Ordering {
    (a.sinks(), a.internal(), a.targets(), a.sign()).cmp(&(b.sinks(), b.internal(), b.targets(), b.sign()))
}

/// Power series in the deformation parameter with graph-sum coefficients,
/// truncated above `precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSeries {
    precision: u32,
    powers: BTreeMap<u32, GraphSum>,
}

impl GraphSeries {
    /// An empty series; every power `0..=precision` is present and empty.
    pub fn new(precision: u32) -> Self {
        GraphSeries {
            precision,
            powers: (0..=precision).map(|k| (k, GraphSum::new())).collect(),
        }
    }

    /// Series exactly as listed; `precision` is the highest power present.
    pub fn from_powers(powers: BTreeMap<u32, GraphSum>) -> Self {
        let precision = powers.keys().next_back().copied().unwrap_or(0);
        GraphSeries { precision, powers }
    }

    /// The identity on `m` arguments: the bare graph on `m` sinks at power 0.
    pub fn identity(m: usize, precision: u32) -> Self {
        let mut s = Self::new(precision);
        s.powers.insert(0, GraphSum::single(CoeffExpr::one(), KontsevichGraph::bare(m)));
        s
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Component at power `k` (empty if absent).
    pub fn get(&self, k: u32) -> &GraphSum {
        static EMPTY: GraphSum = GraphSum { terms: Vec::new() };
        self.powers.get(&k).unwrap_or(&EMPTY)
    }

    pub fn set(&mut self, k: u32, sum: GraphSum) {
        if k <= self.precision {
            self.powers.insert(k, sum);
        }
    }

    pub fn powers(&self) -> impl Iterator<Item = (u32, &GraphSum)> {
        self.powers.iter().map(|(k, s)| (*k, s))
    }

    /// Raises the precision, adding empty components.
    pub fn pad_to(&mut self, precision: u32) {
        for k in self.precision + 1..=precision {
            self.powers.entry(k).or_default();
        }
        self.precision = self.precision.max(precision);
    }

    /// Drops powers above `precision`.
    pub fn truncate(&mut self, precision: u32) {
        self.powers.retain(|k, _| *k <= precision);
        self.precision = self.precision.min(precision);
    }

    /// Sink count shared by all terms.
    pub fn sinks(&self) -> Result<Option<usize>, SeriesError> {
        let mut m = None;
        for s in self.powers.values() {
            if let Some(k) = s.sinks()? {
                match m {
                    None => m = Some(k),
                    Some(j) if j != k => return Err(SeriesError::MixedSinks(j, k)),
                    _ => {}
                }
            }
        }
        Ok(m)
    }

    pub fn map_sums<F>(&self, mut f: F) -> Result<GraphSeries, SeriesError>
    where
        F: FnMut(&GraphSum) -> Result<GraphSum, SeriesError>,
    {
        let mut powers = BTreeMap::new();
        for (k, s) in &self.powers {
            powers.insert(*k, f(s)?);
        }
        Ok(GraphSeries {
            precision: self.precision,
            powers,
        })
    }

    pub fn reduce_mod_skew(&self) -> Result<GraphSeries, SeriesError> {
        self.map_sums(GraphSum::reduce_mod_skew)
    }

    pub fn skew_symmetrize(&self) -> Result<GraphSeries, SeriesError> {
        self.map_sums(GraphSum::skew_symmetrize)
    }

    /// Replaces bound indeterminates termwise, dropping vanishing terms.
    pub fn substitute_relations(&self, bindings: &BTreeMap<Symbol, CoeffExpr>) -> GraphSeries {
        self.map_sums(|s| Ok(s.map_coefficients(|c| c.substitute_map(bindings))))
            .expect("substitution cannot fail")
    }

    /// Coefficient of `target` in every coefficient; zero terms dropped.
    pub fn extract_coefficient(&self, target: &Target) -> GraphSeries {
        self.map_sums(|s| Ok(s.map_coefficients(|c| CoeffExpr::constant(c.coefficient_of(target)))))
            .expect("extraction cannot fail")
    }

    /// `self - other` at every power, reduced modulo skew-symmetry.
    pub fn difference(&self, other: &GraphSeries) -> Result<GraphSeries, SeriesError> {
        let precision = self.precision.min(other.precision);
        let mut out = GraphSeries::new(precision);
        let neg = Rational::from_integer(-1);
        for k in 0..=precision {
            let mut acc = Accumulator::new();
            for (c, g) in self.get(k).terms() {
                acc.add(c, g);
            }
            for (c, g) in other.get(k).terms() {
                acc.add(&c.scale(&neg), g);
            }
            out.set(k, acc.finish());
        }
        Ok(out)
    }

    /// True when every component is empty.
    pub fn is_empty(&self) -> bool {
        self.powers.values().all(GraphSum::is_empty)
    }

    pub fn names(&self) -> Vec<Symbol> {
        crate::coeffs::collect_names(
            self.powers
                .values()
                .flat_map(|s| s.terms.iter().map(|(c, _)| c)),
        )
    }
}

/// Terms sharing one tuple of sink in-degrees.
pub type OrderGroup<'a> = (Vec<usize>, Vec<&'a (CoeffExpr, KontsevichGraph)>);

/// Groups a reduced sum by the in-degrees of the sinks, in order of first
/// appearance; used for the `# i j k` differential-order comments.
pub fn group_by_differential_order(sum: &GraphSum) -> Vec<OrderGroup<'_>> {
    let mut groups: Vec<OrderGroup<'_>> = Vec::new();
    for t in sum.terms() {
        let d = t.1.sink_in_degrees();
        match groups.iter_mut().find(|(k, _)| *k == d) {
            Some((_, v)) => v.push(t),
            None => groups.push((d, alloc::vec![t])),
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::parse_coeff;
    use crate::graph::decode;

    fn g(s: &str) -> KontsevichGraph {
        decode(s).unwrap()
    }

    fn c(s: &str) -> CoeffExpr {
        parse_coeff(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let zero = GraphSum::single(c("1"), g("2 3 1 0 1 0 1 2 3"));
        assert!(zero.reduce_mod_skew().unwrap().is_empty());
        let cancel = GraphSum::from_terms(alloc::vec![(c("1"), g("2 1 1 1 0")), (c("1"), g("2 1 1 0 1"))]);
        assert!(cancel.reduce_mod_skew().unwrap().is_empty());
        let merge = GraphSum::from_terms(alloc::vec![(c("w"), g("2 2 1 0 1 2 0")), (c("1/3"), g("2 2 1 0 1 0 2"))]);
        let r = merge.reduce_mod_skew().unwrap();
        assert_eq!(r.terms(), &[(c("1/3-w"), g("2 2 1 0 1 0 2"))]);
        let mixed = GraphSum::from_terms(alloc::vec![(c("1"), g("2 0 1")), (c("1"), g("3 0 1"))]);
        assert!(matches!(mixed.reduce_mod_skew(), Err(SeriesError::MixedSinks(2, 3))));
    }

    #[test]
    fn skew_examples() {
        let w = GraphSum::single(c("1"), g("2 1 1 0 1"));
        assert_eq!(w.skew_symmetrize().unwrap().terms(), &[(c("2"), g("2 1 1 0 1"))]);
        let bare = GraphSum::single(c("1"), g("2 0 1"));
        assert!(bare.skew_symmetrize().unwrap().is_empty());
    }
}
