use alloc::vec::Vec;

use super::{Accumulator, GraphSeries, GraphSum, SeriesError};
use crate::coeffs::CoeffExpr;
use crate::graph::{KontsevichGraph, Vertex};

/// Inserts the argument graphs into the sinks of `outer`, calling `emit`
/// for every resulting graph.
///
/// Each edge of `outer` that entered sink `a` is redirected, independently of
/// all other edges, to one of the vertices of `args[a]` (Leibniz rule). The
/// result has the argument sinks in argument order, then the internal
/// vertices of the arguments in argument order, then those of `outer`. The
/// sign is the product of all signs.
pub fn insert_graphs<F: FnMut(KontsevichGraph)>(
    outer: &KontsevichGraph,
    args: &[&KontsevichGraph],
    mut emit: F,
) -> Result<(), SeriesError> {
    let m = outer.sinks();
    if args.len() != m {
        return Err(SeriesError::ArgumentCount {
            expected: m,
            found: args.len(),
        });
    }
    let sinks: usize = args.iter().map(|a| a.sinks()).sum();
    let mut sink_offset = Vec::with_capacity(m);
    let mut internal_offset = Vec::with_capacity(m);
    let (mut so, mut io) = (0, sinks);
    for a in args {
        sink_offset.push(so);
        internal_offset.push(io);
        so += a.sinks();
        io += a.internal();
    }
    let outer_base = io;
    let mut sign = outer.sign();
    let mut base: Vec<[Vertex; 2]> = Vec::with_capacity(io - sinks + outer.internal());
    for (k, a) in args.iter().enumerate() {
        sign *= a.sign();
        let ma = a.sinks();
        let map = |t: Vertex| {
            let t = t as usize;
            (if t < ma {
                sink_offset[k] + t
            } else {
                internal_offset[k] + t - ma
            }) as Vertex
        };
        base.extend(a.targets().iter().map(|p| [map(p[0]), map(p[1])]));
    }
    // Outer edges: fixed targets for internal ones, choice lists for sink ones.
    let choices: Vec<Vec<Vertex>> = args
        .iter()
        .enumerate()
        .map(|(k, a)| {
            (sink_offset[k]..sink_offset[k] + a.sinks())
                .chain(internal_offset[k]..internal_offset[k] + a.internal())
                .map(|v| v as Vertex)
                .collect()
        })
        .collect();
    let mut slots: Vec<(usize, usize, usize)> = Vec::new(); // (vertex, side, arg)
    let mut outer_targets: Vec<[Vertex; 2]> = Vec::with_capacity(outer.internal());
    for (j, p) in outer.targets().iter().enumerate() {
        let mut q = [0; 2];
        for side in 0..2 {
            let t = p[side] as usize;
            if t < m {
                slots.push((j, side, t));
            } else {
                q[side] = (outer_base + t - m) as Vertex;
            }
        }
        outer_targets.push(q);
    }
    if slots.iter().any(|&(_, _, a)| choices[a].is_empty()) {
        return Ok(());
    }
    let mut odometer = alloc::vec![0usize; slots.len()];
    loop {
        let mut targets = base.clone();
        let mut tail = outer_targets.clone();
        for (s, &(j, side, a)) in slots.iter().enumerate() {
            tail[j][side] = choices[a][odometer[s]];
        }
        targets.extend(tail);
        emit(KontsevichGraph::from_parts(sinks, sign, targets));
        let mut k = slots.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            odometer[k] += 1;
            if odometer[k] < choices[slots[k].2].len() {
                break;
            }
            odometer[k] = 0;
        }
    }
}

/// Composition of series: `outer(args[0], ..., args[m-1])`.
///
/// Powers add; terms above `precision` are dropped. Coefficients multiply,
/// which fails if two non-constant coefficients meet.
pub fn insert_series(
    outer: &GraphSeries,
    args: &[&GraphSeries],
    precision: u32,
) -> Result<GraphSeries, SeriesError> {
    let mut accs: Vec<Accumulator> = (0..=precision).map(|_| Accumulator::new()).collect();
    for (p, sum) in outer.powers() {
        if p > precision {
            continue;
        }
        for (c, g) in sum.terms() {
            if args.len() != g.sinks() {
                return Err(SeriesError::ArgumentCount {
                    expected: g.sinks(),
                    found: args.len(),
                });
            }
            let mut chosen: Vec<&KontsevichGraph> = Vec::with_capacity(args.len());
            recurse(args, 0, p, precision, c.clone(), &mut chosen, g, &mut accs)?;
        }
    }
    let mut out = GraphSeries::new(precision);
    for (k, acc) in accs.into_iter().enumerate() {
        out.set(k as u32, acc.finish());
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn recurse<'a>(
    args: &[&'a GraphSeries],
    index: usize,
    power: u32,
    precision: u32,
    coeff: CoeffExpr,
    chosen: &mut Vec<&'a KontsevichGraph>,
    outer: &KontsevichGraph,
    accs: &mut [Accumulator],
) -> Result<(), SeriesError> {
    if index == args.len() {
        let acc = &mut accs[power as usize];
        return insert_graphs(outer, chosen, |h| acc.add(&coeff, &h));
    }
    for (q, sum) in args[index].powers() {
        if power + q > precision {
            break;
        }
        for (c, g) in sum.terms() {
            let prod = coeff.try_mul(c)?;
            chosen.push(g);
            recurse(args, index + 1, power + q, precision, prod, chosen, outer, accs)?;
            chosen.pop();
        }
    }
    Ok(())
}

impl GraphSum {
    /// Composition of sums, each term of `outer` applied to every choice of
    /// terms from the arguments; the result is reduced.
    pub fn insert(outer: &GraphSum, args: &[&GraphSum]) -> Result<GraphSum, SeriesError> {
        let mut acc = Accumulator::new();
        let mut stack: Vec<(CoeffExpr, Vec<&KontsevichGraph>)> = alloc::vec![(CoeffExpr::one(), Vec::new())];
        for a in args {
            let mut next = Vec::new();
            for (c, gs) in &stack {
                for (d, g) in a.terms() {
                    let mut v = gs.clone();
                    v.push(g);
                    next.push((c.try_mul(d)?, v));
                }
            }
            stack = next;
        }
        for (c0, g0) in outer.terms() {
            for (c, gs) in &stack {
                let coeff = c0.try_mul(c)?;
                insert_graphs(g0, gs, |h| acc.add(&coeff, &h))?;
            }
        }
        Ok(acc.finish())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::decode;

    fn g(s: &str) -> KontsevichGraph {
        decode(s).unwrap()
    }

    fn count(outer: &str, args: &[&str]) -> usize {
        let args: Vec<KontsevichGraph> = args.iter().map(|a| g(a)).collect();
        let refs: Vec<&KontsevichGraph> = args.iter().collect();
        let mut n = 0;
        insert_graphs(&g(outer), &refs, |_| n += 1).unwrap();
        n
    }

    #[test]
    fn leibniz_term_counts() {
        // wedge applied to (dot, two dots), to (dot, wedge), and the graph with
        // two edges on its first sink applied to (two dots, dot).
        assert_eq!(count("2 1 1 0 1", &["1 0 1", "2 0 1"]), 2);
        assert_eq!(count("2 1 1 0 1", &["1 0 1", "2 1 1 0 1"]), 3);
        assert_eq!(count("2 2 1 0 1 0 2", &["2 0 1", "1 0 1"]), 4);
    }

    #[test]
    fn renumbering() {
        let args = [g("1 0 1"), g("2 1 1 0 1")];
        let mut out = Vec::new();
        insert_graphs(&g("2 1 1 0 1"), &[&args[0], &args[1]], |h| out.push(h)).unwrap();
        let enc: Vec<_> = out.iter().map(|h| alloc::string::ToString::to_string(h)).collect();
        assert_eq!(enc, ["3 2 1 1 2 0 1", "3 2 1 1 2 0 2", "3 2 1 1 2 0 3"]);
    }
}
