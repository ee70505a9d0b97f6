//! Text dump of evaluated operators, one block per power and differential
//! order, with the coefficient of every derivative pattern on the sinks.

use std::collections::BTreeMap;
use std::fmt::Write;

use kgraph_core::poisson::{PoissonStructure, PolyDiffOperator};
use kgraph_core::series::{group_by_differential_order, GraphSeries};

use crate::Error;

/// All multisets of `order` coordinates out of `dim`, as non-decreasing
/// index lists in lexicographic order.
fn multisets(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(order);
    fn rec(dim: usize, order: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == order {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, order, i, cur, out);
            cur.pop();
        }
    }
    rec(dim, order, 0, &mut cur, &mut out);
    out
}

/// Steps a mixed-radix counter with the last digit fastest; false after
/// the final state.
fn advance(idx: &mut [usize], choices: &[Vec<Vec<usize>>]) -> bool {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < choices[a].len() {
            return true;
        }
        idx[a] = 0;
    }
    false
}

/// Renders the header with coordinates and matrix, then for every power of
/// `s` and every differential order occurring there, every slot pattern
/// `# [ x ] [ y z ] ...` followed by its coefficient.
pub fn render_evaluation(s: &GraphSeries, p: &PoissonStructure, ops: &BTreeMap<u32, PolyDiffOperator>) -> Result<String, Error> {
    let coords = p.coords();
    let dim = p.dim();
    let mut out = String::new();
    out.push_str("Coordinates: ");
    for c in &coords {
        let _ = write!(out, "{c} ");
    }
    out.push('\n');
    out.push_str("Poisson structure matrix:\n");
    out.push_str(&p.matrix_string());
    out.push_str("\n\n");
    for (k, sum) in s.powers() {
        let _ = writeln!(out, "h^{k}:");
        let reduced = sum.reduce_mod_skew()?;
        let op = ops.get(&k);
        for (orders, _) in group_by_differential_order(&reduced) {
            out.push('#');
            for d in &orders {
                let _ = write!(out, " {d}");
            }
            out.push_str(" \n");
            let choices: Vec<Vec<Vec<usize>>> = orders.iter().map(|&d| multisets(dim, d)).collect();
            let mut idx = vec![0usize; orders.len()];
            loop {
                let mut slot = vec![0u8; orders.len() * dim];
                out.push('#');
                for (a, &i) in idx.iter().enumerate() {
                    out.push_str(" [");
                    for &c in &choices[a][i] {
                        slot[a * dim + c] += 1;
                        let _ = write!(out, " {}", coords[c]);
                    }
                    out.push_str(" ]");
                }
                out.push('\n');
                let poly = op.map(|o| o.get(&slot));
                match poly {
                    Some(q) => out.push_str(&p.render(&q)),
                    None => out.push('0'),
                }
                out.push('\n');
                if !advance(&mut idx, &choices) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_order() {
        assert_eq!(multisets(2, 2), [vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(multisets(3, 0), [Vec::<usize>::new()]);
    }
}
