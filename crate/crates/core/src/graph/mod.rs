//! Kontsevich graphs: encoding, normal forms, generation and structure.

mod generate;
mod normal;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use generate::{generate, GenerateOptions, LabeledGraphs};
pub use normal::{automorphism_count, for_each_permutation};

/// Vertex index; sinks come first, then internal vertices.
pub type Vertex = u8;

/// Largest supported total vertex count `m + n`.
pub const MAX_VERTICES: usize = 255;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("malformed integer `{0}`")]
    BadInteger(String),
    #[error("expected {expected} integers, found {found}")]
    TokenCount { expected: usize, found: usize },
    #[error("target {target} out of range for {vertices} vertices")]
    TargetOutOfRange { target: usize, vertices: usize },
    #[error("sign must be -1, 0 or 1, found {0}")]
    BadSign(i64),
    #[error("a graph needs at least one sink")]
    NoSinks,
    #[error("too many vertices ({0})")]
    TooManyVertices(usize),
    #[error("operation requires exactly two sinks, graph has {0}")]
    NotTwoSinks(usize),
}

/// Signed Kontsevich graph: `m` sinks and `n` internal vertices, internal
/// vertex `m + j` sending its Left and Right edges to `targets[j]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KontsevichGraph {
    sinks: u8,
    sign: i8,
    targets: Vec<[Vertex; 2]>,
}

impl KontsevichGraph {
    pub fn new(sinks: usize, sign: i8, targets: Vec<[Vertex; 2]>) -> Result<Self, GraphError> {
        if sinks == 0 {
            return Err(GraphError::NoSinks);
        }
        let total = sinks + targets.len();
        if total > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(total));
        }
        if !(-1..=1).contains(&sign) {
            return Err(GraphError::BadSign(sign as i64));
        }
        for &t in targets.iter().flatten() {
            if t as usize >= total {
                return Err(GraphError::TargetOutOfRange {
                    target: t as usize,
                    vertices: total,
                });
            }
        }
        Ok(KontsevichGraph {
            sinks: sinks as u8,
            sign,
            targets,
        })
    }

    /// Unchecked constructor for callers that maintain the invariants.
    pub(crate) fn from_parts(sinks: usize, sign: i8, targets: Vec<[Vertex; 2]>) -> Self {
        debug_assert!(targets
            .iter()
            .flatten()
            .all(|&t| (t as usize) < sinks + targets.len()));
        KontsevichGraph {
            sinks: sinks as u8,
            sign,
            targets,
        }
    }

    /// The graph with `m` sinks and no internal vertices.
    pub fn bare(sinks: usize) -> Self {
        Self::from_parts(sinks, 1, Vec::new())
    }

    pub fn sinks(&self) -> usize {
        self.sinks as usize
    }

    pub fn internal(&self) -> usize {
        self.targets.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.sinks() + self.internal()
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn targets(&self) -> &[[Vertex; 2]] {
        &self.targets
    }

    pub fn with_sign(&self, sign: i8) -> Self {
        let mut g = self.clone();
        g.sign = sign;
        g
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Incoming edge counts for every vertex, sinks first.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0; self.vertex_count()];
        for &t in self.targets.iter().flatten() {
            deg[t as usize] += 1;
        }
        deg
    }

    /// In-degrees of the sinks only (the differential orders in each argument).
    pub fn sink_in_degrees(&self) -> Vec<usize> {
        let mut deg = self.in_degrees();
        deg.truncate(self.sinks());
        deg
    }

    /// Every sink receives at least one edge.
    pub fn has_positive_differential_order(&self) -> bool {
        self.sink_in_degrees().iter().all(|&d| d > 0)
    }

    pub fn has_tadpole(&self) -> bool {
        let m = self.sinks();
        self.targets
            .iter()
            .enumerate()
            .any(|(j, p)| p.contains(&((m + j) as Vertex)))
    }

    pub fn has_double_edge(&self) -> bool {
        self.targets.iter().any(|p| p[0] == p[1])
    }

    /// Swaps the labels of the two sinks.
    pub fn mirror_image(&self) -> Result<Self, GraphError> {
        if self.sinks() != 2 {
            return Err(GraphError::NotTwoSinks(self.sinks()));
        }
        let swap = |t: Vertex| match t {
            0 => 1,
            1 => 0,
            t => t,
        };
        Ok(Self::from_parts(
            2,
            self.sign,
            self.targets.iter().map(|p| [swap(p[0]), swap(p[1])]).collect(),
        ))
    }

    /// Relabels sinks by `perm` (old sink `a` becomes `perm[a]`).
    pub fn permute_sinks(&self, perm: &[usize]) -> Self {
        let m = self.sinks();
        assert_eq!(perm.len(), m, "sink permutation has wrong length");
        let map = |t: Vertex| {
            if (t as usize) < m {
                perm[t as usize] as Vertex
            } else {
                t
            }
        };
        Self::from_parts(
            m,
            self.sign,
            self.targets.iter().map(|p| [map(p[0]), map(p[1])]).collect(),
        )
    }

    /// Applies an internal relabeling and L/R swaps: old internal vertex `j`
    /// becomes internal vertex `perm[j]`, and its edge pair is reversed when
    /// `swaps[j]`. The sign is multiplied by -1 per swap, so the signed
    /// operator is unchanged.
    pub fn act(&self, perm: &[usize], swaps: &[bool]) -> Self {
        let m = self.sinks();
        let n = self.internal();
        assert!(perm.len() == n && swaps.len() == n);
        let map = |t: Vertex| {
            let t = t as usize;
            if t < m {
                t as Vertex
            } else {
                (m + perm[t - m]) as Vertex
            }
        };
        let mut targets = alloc::vec![[0, 0]; n];
        let mut sign = self.sign;
        for j in 0..n {
            let [l, r] = self.targets[j];
            let pair = [map(l), map(r)];
            targets[perm[j]] = if swaps[j] {
                sign = -sign;
                [pair[1], pair[0]]
            } else {
                pair
            };
        }
        Self::from_parts(m, sign, targets)
    }

    /// Connected components of the internal vertices under internal-to-internal
    /// edges, each returned as a graph on the same sinks. The first factor
    /// carries the sign of `self`.
    pub fn prime_factors(&self) -> Vec<KontsevichGraph> {
        let m = self.sinks();
        let n = self.internal();
        if n == 0 {
            return Vec::new();
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (j, pair) in self.targets.iter().enumerate() {
            for &t in pair {
                let t = t as usize;
                if t >= m {
                    let (a, b) = (find(&mut parent, j), find(&mut parent, t - m));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|j| find(&mut parent, j)).collect();
        let mut factors = Vec::new();
        for r in 0..n {
            if roots[r] != r {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&j| roots[j] == r).collect();
            let mut local = alloc::vec![usize::MAX; n];
            for (k, &j) in members.iter().enumerate() {
                local[j] = k;
            }
            let map = |t: Vertex| {
                let t = t as usize;
                if t < m {
                    t as Vertex
                } else {
                    (m + local[t - m]) as Vertex
                }
            };
            let targets = members
                .iter()
                .map(|&j| [map(self.targets[j][0]), map(self.targets[j][1])])
                .collect();
            let sign = if factors.is_empty() { self.sign } else { 1 };
            factors.push(Self::from_parts(m, sign, targets));
        }
        factors
    }

    /// At least one internal vertex and a single connected component.
    pub fn is_prime(&self) -> bool {
        self.internal() > 0 && self.prime_factors().len() == 1
    }

    /// Juxtaposition of graphs on the same sinks (the sink-gluing product).
    pub fn glue(&self, other: &KontsevichGraph) -> KontsevichGraph {
        assert_eq!(self.sinks, other.sinks, "glue needs equal sink counts");
        let m = self.sinks();
        let shift = self.internal() as Vertex;
        let mut targets = self.targets.clone();
        targets.extend(other.targets.iter().map(|p| {
            let s = |t: Vertex| if (t as usize) < m { t } else { t + shift };
            [s(p[0]), s(p[1])]
        }));
        Self::from_parts(m, self.sign * other.sign, targets)
    }

    /// Encoding without the `m n s` header, e.g. `0 1 0 2`.
    pub fn targets_string(&self) -> String {
        let mut s = String::new();
        for (i, t) in self.targets.iter().flatten().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(&t.to_string());
        }
        s
    }
}

impl fmt::Display for KontsevichGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.sinks, self.internal(), self.sign)?;
        for t in self.targets.iter().flatten() {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for KontsevichGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KontsevichGraph({self})")
    }
}

/// Parses `m n s t1L t1R ...`, accepting arbitrary whitespace.
pub fn decode(line: &str) -> Result<KontsevichGraph, GraphError> {
    let nums = line
        .split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| GraphError::BadInteger(t.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    decode_tokens(&nums)
}

pub(crate) fn decode_tokens(nums: &[i64]) -> Result<KontsevichGraph, GraphError> {
    if nums.len() < 3 {
        return Err(GraphError::TokenCount {
            expected: 3,
            found: nums.len(),
        });
    }
    let (m, n, s) = (nums[0], nums[1], nums[2]);
    if m < 1 {
        return Err(GraphError::NoSinks);
    }
    if n < 0 || (m + n) as usize > MAX_VERTICES {
        return Err(GraphError::TooManyVertices((m + n.max(0)) as usize));
    }
    let expected = 3 + 2 * n as usize;
    if nums.len() != expected {
        return Err(GraphError::TokenCount {
            expected,
            found: nums.len(),
        });
    }
    if !(-1..=1).contains(&s) {
        return Err(GraphError::BadSign(s));
    }
    let total = (m + n) as usize;
    let mut targets = Vec::with_capacity(n as usize);
    for pair in nums[3..].chunks(2) {
        let mut p = [0; 2];
        for (k, &t) in pair.iter().enumerate() {
            if t < 0 || t as usize >= total {
                return Err(GraphError::TargetOutOfRange {
                    target: t.max(0) as usize,
                    vertices: total,
                });
            }
            p[k] = t as Vertex;
        }
        targets.push(p);
    }
    Ok(KontsevichGraph::from_parts(m as usize, s as i8, targets))
}

/// Number of tokens a graph encoding starting with `m n` occupies.
pub fn encoding_len(n: usize) -> usize {
    3 + 2 * n
}

impl FromStr for KontsevichGraph {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        decode(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn g(s: &str) -> KontsevichGraph {
        decode(s).unwrap()
    }

    #[test]
    fn encode_decode() {
        let w = g("2  1 1   0 1");
        assert_eq!(w.to_string(), "2 1 1 0 1");
        assert_eq!(g("2 0 1").internal(), 0);
        assert!(matches!(
            decode("2 2 1 0 1 0 5"),
            Err(GraphError::TargetOutOfRange { target: 5, .. })
        ));
        assert!(matches!(decode("2 2 1 0 1 0"), Err(GraphError::TokenCount { .. })));
        assert!(matches!(decode("2 1 2 0 1"), Err(GraphError::BadSign(2))));
    }

    #[test]
    fn degrees() {
        assert_eq!(g("2 1 1 0 1").sink_in_degrees(), vec![1, 1]);
        assert_eq!(g("2 2 1 0 1 0 1").sink_in_degrees(), vec![2, 2]);
        let h = g("2 1 1 0 0");
        assert_eq!(h.sink_in_degrees(), vec![2, 0]);
        assert!(!h.has_positive_differential_order());
    }

    #[test]
    fn factorization() {
        let two = g("2 2 1 0 1 0 1").prime_factors();
        assert_eq!(two, vec![g("2 1 1 0 1"), g("2 1 1 0 1")]);
        assert_eq!(g("2 2 1 0 1 0 2").prime_factors(), vec![g("2 2 1 0 1 0 2")]);
        assert_eq!(g("2 1 1 1 0").prime_factors(), vec![g("2 1 1 1 0")]);
        assert!(g("2 0 1").prime_factors().is_empty());
        assert_eq!(g("2 1 1 0 1").glue(&g("2 1 1 0 1")), g("2 2 1 0 1 0 1"));
    }

    #[test]
    fn mirror() {
        assert_eq!(g("2 2 1 0 1 0 2").mirror_image().unwrap(), g("2 2 1 1 0 1 2"));
        assert_eq!(g("2 0 1").mirror_image().unwrap(), g("2 0 1"));
        assert!(g("3 0 1").mirror_image().is_err());
    }
}
