//! The star product from graph weights, its associator, cyclic weight
//! relations and gauge transformations.

mod cyclic;
mod gauge;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use crate::coeffs::{CoeffError, CoeffExpr, Rational};
use crate::graph::{automorphism_count, generate, GenerateOptions, KontsevichGraph};
use crate::series::{insert_series, GraphSeries, GraphSum, SeriesError};

pub use cyclic::{cyclic_weight_relations, StarWeights};
pub use gauge::{gauge_inverse, gauge_transform};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StarError {
    #[error("no weight known for basic graph {0}")]
    MissingWeight(String),
    #[error("expected graphs on {expected} sinks, found {found}")]
    WrongSinks { expected: usize, found: usize },
    #[error("gauge transformation must start with the single-vertex graph with coefficient 1")]
    BadGaugeStart,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// What to do when a basic graph has no entry in the weight table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingWeight {
    #[default]
    Error,
    /// Treat the weight as 0; useful with tables that list only the
    /// nonzero weights.
    Zero,
}

/// Kontsevich weights of basic graphs, keyed by normal form (sign +1, or 0
/// for zero graphs, whose weight is 0).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BasicWeightTable {
    weights: BTreeMap<KontsevichGraph, CoeffExpr>,
    max_order: u32,
}

impl BasicWeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads a table from a two-sink series where the line `g c` states
    /// `w(g) = c`; listed graphs need not be in normal form.
    pub fn from_series(s: &GraphSeries) -> Result<Self, StarError> {
        let mut t = BasicWeightTable::new();
        for (k, sum) in s.powers() {
            for (c, g) in sum.terms() {
                if g.sinks() != 2 {
                    return Err(StarError::WrongSinks {
                        expected: 2,
                        found: g.sinks(),
                    });
                }
                t.insert(g, c.clone());
            }
            t.max_order = t.max_order.max(k);
        }
        Ok(t)
    }

    /// Records `w(g) = c`.
    pub fn insert(&mut self, g: &KontsevichGraph, c: CoeffExpr) {
        let nf = g.normal_form();
        self.max_order = self.max_order.max(g.internal() as u32);
        match nf.sign() {
            0 => {
                self.weights.insert(nf, CoeffExpr::zero());
            }
            s => {
                let c = c.scale(&Rational::from_integer(s as i64));
                self.weights.insert(nf.with_sign(1), c);
            }
        }
    }

    /// Symbolic weights `w_<k>_<i>` for the basic set at order `k`,
    /// numbered from 1 in generation order, skipping zero graphs.
    pub fn insert_symbolic(&mut self, k: usize) {
        let mut i = 0;
        for g in generate(k, 2, &GenerateOptions::basic()) {
            if g.is_zero() {
                self.weights.insert(g, CoeffExpr::zero());
            } else {
                i += 1;
                let name = alloc::format!("w_{k}_{i}");
                self.weights.insert(g, CoeffExpr::var(name.as_str()));
            }
        }
        self.max_order = self.max_order.max(k as u32);
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn get(&self, nf: &KontsevichGraph) -> Option<&CoeffExpr> {
        self.weights.get(nf)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&KontsevichGraph, &CoeffExpr)> {
        self.weights.iter()
    }

    /// Keeps only the entries of order `k` or less.
    pub fn restrict(&mut self, k: u32) {
        self.weights.retain(|g, _| g.internal() as u32 <= k);
        self.max_order = self.max_order.min(k);
    }

    /// Weight of a prime graph with sign +1, from the table or via its mirror.
    fn prime_weight(&self, f: &KontsevichGraph, policy: MissingWeight) -> Result<CoeffExpr, StarError> {
        if !f.has_positive_differential_order() {
            return Ok(CoeffExpr::zero());
        }
        let nf = f.normal_form();
        let t = nf.sign();
        if t == 0 {
            return Ok(CoeffExpr::zero());
        }
        let abs = nf.with_sign(1);
        let w_abs = match self.weights.get(&abs) {
            Some(w) => w.clone(),
            None => {
                let mirror = abs.mirror_image().expect("two sinks").normal_form();
                let u = mirror.sign();
                if u == 0 {
                    return Ok(CoeffExpr::zero());
                }
                match self.weights.get(&mirror.with_sign(1)) {
                    Some(w) => {
                        let k = f.internal();
                        let parity = if k % 2 == 0 { 1 } else { -1 };
                        w.scale(&Rational::from_integer((parity * u) as i64))
                    }
                    None => match policy {
                        MissingWeight::Zero => CoeffExpr::zero(),
                        MissingWeight::Error => return Err(StarError::MissingWeight(abs.to_string())),
                    },
                }
            }
        };
        Ok(w_abs.scale(&Rational::from_integer(t as i64)))
    }
}

/// Kontsevich weight of an arbitrary two-sink graph.
///
/// Zero graphs and graphs with an empty sink weigh 0; otherwise the weight
/// is the product over prime factors, each looked up directly or through
/// its mirror image (a factor -1 per internal vertex), with the signs
/// relating each labeling to the stored normal form.
pub fn weight_of(g: &KontsevichGraph, table: &BasicWeightTable, policy: MissingWeight) -> Result<CoeffExpr, StarError> {
    if g.sinks() != 2 {
        return Err(StarError::WrongSinks {
            expected: 2,
            found: g.sinks(),
        });
    }
    let nf = g.normal_form();
    if nf.is_zero() {
        return Ok(CoeffExpr::zero());
    }
    let sign = CoeffExpr::constant(Rational::from_integer(nf.sign() as i64));
    if g.internal() == 0 {
        return Ok(sign);
    }
    if !g.has_positive_differential_order() {
        return Ok(CoeffExpr::zero());
    }
    let mut w = sign;
    for f in nf.prime_factors() {
        let fw = table.prime_weight(&f.with_sign(1), policy)?;
        w = w.try_mul(&fw)?;
        if w.is_zero() {
            break;
        }
    }
    Ok(w)
}

/// Multiplicity of a normal form in the orbit sum: `2^k / |Aut(g)|`, the
/// number of labeled graphs representing it divided by `k!`.
pub fn orbit_factor(g: &KontsevichGraph) -> Rational {
    let k = g.internal();
    Rational::new(1i64 << k, automorphism_count(g) as i64)
}

/// Star product up to `ħ^k_max`: at `ħ^k`, every normal form of the graphs
/// without tadpoles and double edges, with coefficient `2^k w(g)/|Aut(g)|`.
pub fn build_star_product(table: &BasicWeightTable, k_max: u32, policy: MissingWeight) -> Result<GraphSeries, StarError> {
    let mut star = GraphSeries::new(k_max);
    star.set(0, GraphSum::single(CoeffExpr::one(), KontsevichGraph::bare(2)));
    let opts = GenerateOptions {
        normal_forms: true,
        positive_differential_order: true,
        include_zero: false,
        ..GenerateOptions::default()
    };
    for k in 1..=k_max {
        let mut sum = GraphSum::new();
        for g in generate(k as usize, 2, &opts) {
            let w = weight_of(&g, table, policy)?;
            if !w.is_zero() {
                sum.push(w.scale(&orbit_factor(&g)), g);
            }
        }
        star.set(k, sum);
    }
    Ok(star)
}

/// `(f ⋆ g) ⋆ h - f ⋆ (g ⋆ h)` as a three-sink series.
pub fn associator(star: &GraphSeries) -> Result<GraphSeries, StarError> {
    if let Some(m) = star.sinks()? {
        if m != 2 {
            return Err(StarError::WrongSinks { expected: 2, found: m });
        }
    }
    let p = star.precision();
    let id = GraphSeries::identity(1, p);
    let left = insert_series(star, &[star, &id], p)?;
    let right = insert_series(star, &[&id, star], p)?;
    Ok(left.difference(&right)?)
}
