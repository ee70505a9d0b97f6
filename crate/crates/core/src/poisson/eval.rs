use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::jet::{JetPoly, Monomial, MAX_DIM};
use super::structure::PoissonStructure;
use super::PoissonError;
use crate::coeffs::{CoeffExpr, Rational};
use crate::graph::KontsevichGraph;
use crate::series::{GraphSeries, GraphSum};

/// Derivative counts per coordinate for one sink.
pub type MultiIndex = [u8; MAX_DIM];

/// A polydifferential operator `Σ c^{I J ...} ∂_I f ∂_J g ...`.
///
/// Keys are the concatenated multi-indices of the sinks, `dim` entries each.
/// Only nonzero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDiffOperator {
    arity: usize,
    dim: usize,
    terms: BTreeMap<Vec<u8>, JetPoly>,
}

impl PolyDiffOperator {
    pub fn zero(arity: usize, dim: usize) -> Self {
        PolyDiffOperator {
            arity,
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &JetPoly)> {
        self.terms.iter()
    }

    /// Coefficient at a slot; zero when absent.
    pub fn get(&self, slot: &[u8]) -> JetPoly {
        self.terms.get(slot).cloned().unwrap_or_else(|| JetPoly::zero(self.dim))
    }

    pub fn add_at(&mut self, slot: Vec<u8>, p: &JetPoly, c: &Rational) {
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(slot) {
            Entry::Vacant(v) => {
                let q = p.scale(c);
                if !q.is_zero() {
                    v.insert(q);
                }
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_scaled(p, c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &PolyDiffOperator, c: &Rational) {
        for (slot, p) in &other.terms {
            self.add_at(slot.clone(), p, c);
        }
    }
}

/// Evaluates graphs at one Poisson structure, caching the derivatives
/// `∂_K P^{ab}` across calls.
pub struct Evaluator<'a> {
    structure: &'a PoissonStructure,
    pairs: Vec<(u8, u8)>,
    cache: HashMap<(u8, u8, MultiIndex), JetPoly>,
}

impl<'a> Evaluator<'a> {
    pub fn new(structure: &'a PoissonStructure) -> Self {
        let d = structure.dim();
        let pairs = (0..d)
            .flat_map(|a| (0..d).map(move |b| (a, b)))
            .filter(|&(a, b)| !structure.entry(a, b).is_zero())
            .map(|(a, b)| (a as u8, b as u8))
            .collect();
        Evaluator {
            structure,
            pairs,
            cache: HashMap::new(),
        }
    }

    pub fn structure(&self) -> &PoissonStructure {
        self.structure
    }

    fn ensure(&mut self, a: u8, b: u8, k: MultiIndex) {
        if self.cache.contains_key(&(a, b, k)) {
            return;
        }
        let value = match k.iter().position(|&c| c > 0) {
            None => self.structure.entry(a as usize, b as usize).clone(),
            Some(i) => {
                let mut lower = k;
                lower[i] -= 1;
                self.ensure(a, b, lower);
                self.cache[&(a, b, lower)].derivative(i)
            }
        };
        self.cache.insert((a, b, k), value);
    }

    /// The operator a single graph represents, including its sign.
    pub fn graph(&mut self, g: &KontsevichGraph) -> PolyDiffOperator {
        let d = self.structure.dim();
        let m = g.sinks();
        let n = g.internal();
        let mut out: HashMap<Vec<u8>, JetPoly> = HashMap::new();
        if g.sign() != 0 && !self.pairs.is_empty() {
            let npairs = self.pairs.len();
            let mut choice = alloc::vec![0usize; n];
            let mut counts = alloc::vec![[0u8; MAX_DIM]; m + n];
            'outer: loop {
                for c in counts.iter_mut() {
                    *c = [0; MAX_DIM];
                }
                for (j, t) in g.targets().iter().enumerate() {
                    let (a, b) = self.pairs[choice[j]];
                    counts[t[0] as usize][a as usize] += 1;
                    counts[t[1] as usize][b as usize] += 1;
                }
                let mut product: Option<JetPoly> = None;
                let mut vanished = false;
                for j in 0..n {
                    let (a, b) = self.pairs[choice[j]];
                    let key = (a, b, counts[m + j]);
                    self.ensure(a, b, key.2);
                    let factor = &self.cache[&key];
                    if factor.is_zero() {
                        vanished = true;
                        break;
                    }
                    product = Some(match product {
                        None => factor.clone(),
                        Some(p) => p.mul(factor),
                    });
                }
                if !vanished {
                    let product = product.unwrap_or_else(|| JetPoly::constant(d, Rational::ONE));
                    let slot: Vec<u8> = counts[..m].iter().flat_map(|c| c[..d].iter().copied()).collect();
                    out.entry(slot).or_insert_with(|| JetPoly::zero(d)).add_scaled(&product, &Rational::ONE);
                }
                let mut j = 0;
                loop {
                    if j == n {
                        break 'outer;
                    }
                    choice[j] += 1;
                    if choice[j] < npairs {
                        break;
                    }
                    choice[j] = 0;
                    j += 1;
                }
            }
        }
        let sign = Rational::from_integer(g.sign() as i64);
        PolyDiffOperator {
            arity: m,
            dim: d,
            terms: out.into_iter().filter(|(_, p)| !p.is_zero()).map(|(s, p)| (s, p.scale(&sign))).collect(),
        }
    }

    /// The operator of a sum whose coefficients are all numeric.
    pub fn sum(&mut self, s: &GraphSum) -> Result<PolyDiffOperator, PoissonError> {
        let arity = s.sinks()?.unwrap_or(0);
        let mut out = PolyDiffOperator::zero(arity, self.structure.dim());
        for (c, g) in s.terms() {
            let c = c.as_constant().ok_or_else(|| PoissonError::SymbolicCoefficient(c.to_string()))?;
            if !c.is_zero() {
                out.add_scaled(&self.graph(g), c);
            }
        }
        Ok(out)
    }
}

/// Per-power operators of a numeric graph series.
pub fn evaluate(s: &GraphSeries, p: &PoissonStructure) -> Result<BTreeMap<u32, PolyDiffOperator>, PoissonError> {
    let mut ev = Evaluator::new(p);
    s.powers().map(|(k, sum)| Ok((k, ev.sum(sum)?))).collect()
}

/// Groups symbolic contributions by power, sink slot and monomial; each
/// group's total must vanish.
#[derive(Default)]
pub struct VanishCollector {
    groups: HashMap<(u32, Vec<u8>, Monomial), CoeffExpr>,
}

impl VanishCollector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c` times the operator at power `k`.
    pub fn add(&mut self, k: u32, c: &CoeffExpr, op: &PolyDiffOperator) {
        for (slot, poly) in op.terms() {
            for (mono, r) in poly.terms() {
                let e = self.groups.entry((k, slot.clone(), mono.clone())).or_default();
                e.add_scaled(c, r);
            }
        }
    }

    pub fn merge(&mut self, other: VanishCollector) {
        for (key, c) in other.groups {
            self.groups.entry(key).or_default().add_scaled(&c, &Rational::ONE);
        }
    }

    /// The distinct relations in a fixed order, each up to rational scaling.
    ///
    /// A group with no indeterminates and a nonzero total cannot be made to
    /// vanish and is reported as an error.
    pub fn finish(self) -> Result<Vec<CoeffExpr>, PoissonError> {
        let mut groups: Vec<_> = self.groups.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        groups.sort_by(|a, b| a.0.cmp(&b.0));
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for ((k, _, _), c) in groups {
            if c.is_constant() {
                return Err(PoissonError::Inconsistent { power: k, value: c.to_string() });
            }
            if seen.insert(c.monic()) {
                out.push(c);
            }
        }
        Ok(out)
    }
}

/// Linear relations on the indeterminates of `s` that make every term of
/// its restriction to `p` vanish.
///
/// `keep(k, orders)` selects which graphs of power `k` with the given sink
/// differential orders take part.
pub fn make_vanish<F>(s: &GraphSeries, p: &PoissonStructure, mut keep: F) -> Result<Vec<CoeffExpr>, PoissonError>
where
    F: FnMut(u32, &[usize]) -> bool,
{
    let mut ev = Evaluator::new(p);
    let mut collector = VanishCollector::new();
    for (k, sum) in s.powers() {
        for (c, g) in sum.terms() {
            if c.is_zero() || !keep(k, &g.sink_in_degrees()) {
                continue;
            }
            let op = ev.graph(g);
            collector.add(k, c, &op);
        }
    }
    collector.finish()
}
