use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{orbit_factor, StarError};
use crate::coeffs::{CoeffExpr, Rational};
use crate::graph::{KontsevichGraph, Vertex};
use crate::series::GraphSeries;

/// Weights read back from the coefficients of a star product.
///
/// A normal form `g` at `ħ^k` with coefficient `c` has weight
/// `c·|Aut(g)|/2^k`; graphs absent from the star weigh 0.
pub struct StarWeights {
    weights: HashMap<KontsevichGraph, CoeffExpr>,
}

impl StarWeights {
    pub fn from_star(star: &GraphSeries) -> Result<Self, StarError> {
        let mut weights = HashMap::new();
        for (_, sum) in star.powers() {
            for (c, g) in sum.reduce_mod_skew()?.terms() {
                let w = c.scale(&orbit_factor(g).recip()?);
                weights.insert(g.clone(), w);
            }
        }
        Ok(StarWeights { weights })
    }

    pub fn weight(&self, g: &KontsevichGraph) -> CoeffExpr {
        let nf = g.normal_form();
        match nf.sign() {
            0 => CoeffExpr::zero(),
            s => match self.weights.get(&nf.with_sign(1)) {
                Some(w) if s == 1 => w.clone(),
                Some(w) => -w,
                None => CoeffExpr::zero(),
            },
        }
    }
}

/// Cyclic weight relations `w(Γ) - (-1)^k Σ_E (-1)^{N_0(Γ_E)} w(Γ_E)` for
/// every prime graph `Γ` of the star, where `E` runs over the sets of edges
/// not landing on sink 0 and `Γ_E` redirects the edges of `E` to sink 0.
///
/// Each returned expression is asserted to vanish. Tautologies are dropped
/// and relations equal up to a rational factor are reported once.
pub fn cyclic_weight_relations(star: &GraphSeries) -> Result<Vec<CoeffExpr>, StarError> {
    let weights = StarWeights::from_star(star)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (k, sum) in star.powers() {
        if k == 0 {
            continue;
        }
        for (_, g) in sum.terms() {
            if !g.is_prime() {
                continue;
            }
            let rel = relation_for(g, &weights);
            if rel.is_zero() {
                continue;
            }
            if seen.insert(rel.monic()) {
                out.push(rel);
            }
        }
    }
    Ok(out)
}

fn relation_for(g: &KontsevichGraph, weights: &StarWeights) -> CoeffExpr {
    let k = g.internal();
    let movable: Vec<(usize, usize)> = (0..k)
        .flat_map(|j| [(j, 0), (j, 1)])
        .filter(|&(j, side)| g.targets()[j][side] != 0)
        .collect();
    let mut rhs = CoeffExpr::zero();
    for mask in 0u32..(1 << movable.len()) {
        let mut targets: Vec<[Vertex; 2]> = g.targets().to_vec();
        for (bit, &(j, side)) in movable.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                targets[j][side] = 0;
            }
        }
        let n0 = targets.iter().flatten().filter(|&&t| t == 0).count();
        let ge = KontsevichGraph::from_parts(2, g.sign(), targets);
        let w = weights.weight(&ge);
        let sign = if n0 % 2 == 0 { 1 } else { -1 };
        rhs.add_scaled(&w, &Rational::from_integer(sign));
    }
    let outer = if k % 2 == 0 { 1 } else { -1 };
    let mut rel = weights.weight(g);
    rel.add_scaled(&rhs, &Rational::from_integer(-outer));
    rel
}
