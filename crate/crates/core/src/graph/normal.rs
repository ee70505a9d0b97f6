use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{KontsevichGraph, Vertex};

/// Calls `f` once for every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut f: F) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Writes the relabeling of `g` by `perm` with every pair sorted into `out`
/// and returns the number of pairs that had to be reversed, mod 2.
fn relabel_sorted(g: &KontsevichGraph, perm: &[usize], out: &mut [[Vertex; 2]]) -> bool {
    let m = g.sinks();
    let map = |t: Vertex| {
        let t = t as usize;
        if t < m {
            t as Vertex
        } else {
            (m + perm[t - m]) as Vertex
        }
    };
    let mut odd = false;
    for (j, &[l, r]) in g.targets.iter().enumerate() {
        let (a, b) = (map(l), map(r));
        out[perm[j]] = if a > b {
            odd = !odd;
            [b, a]
        } else {
            [a, b]
        };
    }
    odd
}

impl KontsevichGraph {
    /// Canonical representative under internal relabelings and L/R swaps.
    ///
    /// The target list with every pair sorted is minimized as a base-(m+n)
    /// number over all internal relabelings. The sign absorbs one factor -1
    /// per reversed pair; it becomes 0 when the graph is skew-symmetric under
    /// one of its own symmetries (including a doubled edge), so that its
    /// operator vanishes.
    pub fn normal_form(&self) -> KontsevichGraph {
        let n = self.internal();
        if n == 0 {
            return self.clone();
        }
        let mut forced_zero = self.sign == 0 || self.has_double_edge();
        let mut best = vec![[Vertex::MAX; 2]; n];
        let mut best_odd = false;
        let mut cand = vec![[0; 2]; n];
        for_each_permutation(n, |perm| {
            let odd = relabel_sorted(self, perm, &mut cand);
            match cand.as_slice().cmp(best.as_slice()) {
                Ordering::Less => {
                    best.copy_from_slice(&cand);
                    best_odd = odd;
                    forced_zero = self.sign == 0 || self.has_double_edge();
                }
                Ordering::Equal if odd != best_odd => forced_zero = true,
                _ => {}
            }
        });
        let sign = if forced_zero {
            0
        } else if best_odd {
            -self.sign
        } else {
            self.sign
        };
        KontsevichGraph::from_parts(self.sinks(), sign, best)
    }

    /// Normal form with sign +1 (or 0), i.e. the graph up to its sign.
    pub fn absolute_normal_form(&self) -> KontsevichGraph {
        let nf = self.normal_form();
        if nf.sign == -1 {
            nf.with_sign(1)
        } else {
            nf
        }
    }
}

/// Number of pairs (relabeling, swap pattern) in S_n × (Z_2)^n that fix the
/// labeled target list of `g` exactly.
pub fn automorphism_count(g: &KontsevichGraph) -> u64 {
    let n = g.internal();
    let identity: Vec<usize> = (0..n).collect();
    let mut reference = vec![[0; 2]; n];
    relabel_sorted(g, &identity, &mut reference);
    let mut cand = vec![[0; 2]; n];
    let mut count = 0u64;
    for_each_permutation(n, |perm| {
        relabel_sorted(g, perm, &mut cand);
        if cand == reference {
            count += 1;
        }
    });
    count << g.targets.iter().filter(|p| p[0] == p[1]).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::decode;

    fn g(s: &str) -> KontsevichGraph {
        decode(s).unwrap()
    }

    #[test]
    fn permutation_counts() {
        for n in 0..6 {
            let mut k = 0;
            let mut seen = alloc::collections::BTreeSet::new();
            for_each_permutation(n, |p| {
                k += 1;
                seen.insert(p.to_vec());
            });
            assert_eq!(k, (1..=n).product::<usize>());
            assert_eq!(seen.len(), k);
        }
    }

    #[test]
    fn simple_forms() {
        assert_eq!(g("2 1 1 1 0").normal_form(), g("2 1 -1 0 1"));
        assert_eq!(g("2 3 1 0 1 0 1 2 3").normal_form().sign(), 0);
        assert_eq!(g("2 1 1 0 0").normal_form().sign(), 0);
        assert_eq!(g("2 2 1 1 0 1 2").normal_form(), g("2 2 -1 0 1 1 2"));
    }

    #[test]
    fn automorphisms() {
        assert_eq!(automorphism_count(&g("2 2 1 0 1 0 1")), 2);
        assert_eq!(automorphism_count(&g("2 2 1 0 1 0 2")), 1);
        assert_eq!(automorphism_count(&g("2 2 1 0 3 1 2")), 1);
    }
}
