//! Exact solution of affine systems over the rationals.
//!
//! Elimination is incremental Gauss-Jordan: each incoming equation is
//! reduced by the pivots found so far, gets a pivot of its own, and that
//! pivot is then cleared from every earlier row. Pivots prefer names outside
//! the `preferred_free` set, so those stay free whenever the rank allows.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::coeffs::{collect_names, CoeffExpr, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinsolveError {
    /// Equation `equation` (0-based) reduces to the nonzero constant `residual`.
    #[error("system is inconsistent: equation {} reduces to {residual} == 0", equation + 1)]
    Inconsistent { equation: usize, residual: Rational },
}

/// Equations `e == 0`, all affine in their names.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    pub equations: Vec<CoeffExpr>,
    pub preferred_free: BTreeSet<Symbol>,
}

/// A solved system: each bound name as an affine expression in the free ones.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub solved: BTreeMap<Symbol, CoeffExpr>,
    pub free: Vec<Symbol>,
}

impl Solution {
    /// Lines `NAME==EXPR` in name order.
    pub fn lines(&self) -> Vec<String> {
        self.solved.iter().map(|(k, v)| alloc::format!("{k}=={v}")).collect()
    }
}

impl LinearSystem {
    pub fn new(equations: Vec<CoeffExpr>) -> Self {
        LinearSystem {
            equations,
            preferred_free: BTreeSet::new(),
        }
    }

    pub fn with_preferred_free<I: IntoIterator<Item = Symbol>>(mut self, names: I) -> Self {
        self.preferred_free = names.into_iter().collect();
        self
    }

    /// Every name mentioned by some equation, sorted.
    pub fn unknowns(&self) -> Vec<Symbol> {
        collect_names(&self.equations)
    }

    /// `Greater` when `a` should be eliminated before `b`.
    fn pivot_priority(&self, a: &Symbol, b: &Symbol) -> Ordering {
        let pa = self.preferred_free.contains(a);
        let pb = self.preferred_free.contains(b);
        pb.cmp(&pa).then_with(|| a.cmp(b))
    }

    pub fn solve(&self) -> Result<Solution, LinsolveError> {
        // pivot name -> row normalized so that the pivot has coefficient 1
        let mut rows: BTreeMap<Symbol, CoeffExpr> = BTreeMap::new();
        for (idx, eq) in self.equations.iter().enumerate() {
            let mut r = eq.clone();
            let hits: Vec<(Symbol, Rational)> = r
                .terms()
                .filter(|(n, _)| rows.contains_key(*n))
                .map(|(n, c)| (n.clone(), c.clone()))
                .collect();
            for (name, c) in hits {
                r.add_scaled(&rows[&name], &-c);
            }
            if r.is_zero() {
                continue;
            }
            if r.is_constant() {
                return Err(LinsolveError::Inconsistent {
                    equation: idx,
                    residual: r.constant_part().clone(),
                });
            }
            let pivot = r
                .names()
                .max_by(|a, b| self.pivot_priority(a, b))
                .cloned()
                .expect("row has a name");
            let lead = r.coefficient(&pivot).expect("pivot occurs").recip().expect("nonzero coefficient");
            let r = r.scale(&lead);
            for row in rows.values_mut() {
                if let Some(c) = row.coefficient(&pivot).cloned() {
                    row.add_scaled(&r, &-c);
                }
            }
            rows.insert(pivot, r);
        }
        let neg = Rational::from_integer(-1);
        let mut solved = BTreeMap::new();
        for (pivot, row) in rows {
            let mut rest = row;
            rest.add_term(&pivot, &neg);
            solved.insert(pivot, rest.scale(&neg));
        }
        let free = self.unknowns().into_iter().filter(|n| !solved.contains_key(n)).collect();
        Ok(Solution { solved, free })
    }
}

/// Whether substituting `bindings` turns every equation into exactly 0.
pub fn verify_solution(equations: &[CoeffExpr], bindings: &BTreeMap<Symbol, CoeffExpr>) -> bool {
    equations.iter().all(|e| e.substitute_map(bindings).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::parse_coeff;

    fn sys(eqs: &[&str]) -> LinearSystem {
        LinearSystem::new(eqs.iter().map(|e| parse_coeff(e).unwrap()).collect())
    }

    #[test]
    fn pins_every_unknown() {
        let s = sys(&["w_2_1-1/3", "w_2_2+1/3", "w_2_3+1/6"]).solve().unwrap();
        assert_eq!(s.lines(), ["w_2_1==1/3", "w_2_2==-1/3", "w_2_3==-1/6"]);
        assert!(s.free.is_empty());
        let s = sys(&["-1/1728-1/2*w_4_1"]).solve().unwrap();
        assert_eq!(s.lines(), ["w_4_1==-1/864"]);
    }

    #[test]
    fn inconsistent() {
        let e = sys(&["x+y-1", "x+y-2"]).solve().unwrap_err();
        assert_eq!(
            e,
            LinsolveError::Inconsistent {
                equation: 1,
                residual: Rational::from_integer(-1)
            }
        );
    }

    #[test]
    fn preferred_names_stay_free() {
        let m: Symbol = "m".into();
        let s = sys(&["a+b-m", "a-b-1"]).with_preferred_free([m.clone()]).solve().unwrap();
        assert_eq!(s.free, [m]);
        assert_eq!(s.lines(), ["a==1/2*m+1/2", "b==1/2*m-1/2"]);
        let plain = sys(&["a+b-m", "a-b-1"]).solve().unwrap();
        assert_eq!(plain.free, [Symbol::from("a")]);
    }

    #[test]
    fn verification() {
        let system = sys(&["a+b-m", "a-b-1"]);
        let s = system.solve().unwrap();
        assert!(verify_solution(&system.equations, &s.solved));
        assert!(verify_solution(&[], &BTreeMap::new()));
        let mut wrong = s.solved.clone();
        wrong.insert("a".into(), parse_coeff("0").unwrap());
        assert!(!verify_solution(&system.equations, &wrong));
    }
}
