use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{KontsevichGraph, Vertex};

/// Filters for [`generate`].
///
/// The default enumerates the graphs without tadpoles (an edge from a
/// vertex to itself) and without double edges (both edges of a vertex on
/// the same target), i.e. exactly the graphs that occur in star products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerateOptions {
    pub allow_tadpoles: bool,
    pub allow_multiple_edges: bool,
    /// Emit each normal form once (sign +1, or 0 for zero graphs).
    pub normal_forms: bool,
    pub positive_differential_order: bool,
    pub prime: bool,
    /// With two sinks, keep a graph only if its normal form is not larger
    /// than the normal form of its mirror image.
    pub modulo_mirror_images: bool,
    pub max_internal_indegree: Option<usize>,
    /// Keep graphs whose normal form has sign 0.
    pub include_zero: bool,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            allow_tadpoles: false,
            allow_multiple_edges: false,
            normal_forms: false,
            positive_differential_order: false,
            prime: false,
            modulo_mirror_images: false,
            max_internal_indegree: None,
            include_zero: true,
        }
    }
}

impl GenerateOptions {
    /// Prime, positive-differential-order normal forms up to mirror images.
    pub fn basic() -> Self {
        GenerateOptions {
            normal_forms: true,
            positive_differential_order: true,
            prime: true,
            modulo_mirror_images: true,
            ..Self::default()
        }
    }

    fn accepts_labeled(&self, g: &KontsevichGraph) -> bool {
        if self.positive_differential_order && !g.has_positive_differential_order() {
            return false;
        }
        if let Some(k) = self.max_internal_indegree {
            if g.in_degrees()[g.sinks()..].iter().any(|&d| d > k) {
                return false;
            }
        }
        if self.prime && !g.is_prime() {
            return false;
        }
        true
    }
}

/// Iterator over labeled graphs with `n` internal vertices on `m` sinks, in
/// lexicographic order of target lists read as base-(m+n) numbers.
pub struct LabeledGraphs {
    m: usize,
    choices: Vec<Vec<[Vertex; 2]>>,
    odometer: Vec<usize>,
    done: bool,
}

impl LabeledGraphs {
    pub fn new(n: usize, m: usize, allow_tadpoles: bool, allow_multiple_edges: bool) -> Self {
        assert!(m >= 1, "at least one sink");
        assert!(m + n <= super::MAX_VERTICES, "too many vertices");
        let total = m + n;
        let choices: Vec<Vec<[Vertex; 2]>> = (0..n)
            .map(|j| {
                let me = m + j;
                let mut v = Vec::new();
                for a in 0..total {
                    for b in 0..total {
                        if !allow_tadpoles && (a == me || b == me) {
                            continue;
                        }
                        if !allow_multiple_edges && a == b {
                            continue;
                        }
                        v.push([a as Vertex, b as Vertex]);
                    }
                }
                v
            })
            .collect();
        let done = choices.iter().any(|c| c.is_empty());
        LabeledGraphs {
            m,
            odometer: alloc::vec![0; n],
            choices,
            done,
        }
    }

    /// Number of graphs the iterator yields in total.
    pub fn total(&self) -> u128 {
        self.choices.iter().map(|c| c.len() as u128).product()
    }
}

impl Iterator for LabeledGraphs {
    type Item = KontsevichGraph;

    fn next(&mut self) -> Option<KontsevichGraph> {
        if self.done {
            return None;
        }
        let targets = self
            .odometer
            .iter()
            .zip(&self.choices)
            .map(|(&i, c)| c[i])
            .collect();
        let g = KontsevichGraph::from_parts(self.m, 1, targets);
        // Advance, least significant digit last.
        let mut k = self.odometer.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.odometer[k] += 1;
            if self.odometer[k] < self.choices[k].len() {
                break;
            }
            self.odometer[k] = 0;
        }
        Some(g)
    }
}

/// Enumerates graphs with `n` internal vertices on `m` sinks.
///
/// Labeled output follows lexicographic order of target lists; normal-form
/// output is sorted the same way by the normal-form target lists.
pub fn generate(n: usize, m: usize, opts: &GenerateOptions) -> Vec<KontsevichGraph> {
    let labeled = LabeledGraphs::new(n, m, opts.allow_tadpoles, opts.allow_multiple_edges)
        .filter(|g| opts.accepts_labeled(g));
    if !opts.normal_forms {
        return labeled
            .filter(|g| opts.include_zero || !g.normal_form().is_zero())
            .filter(|g| !opts.modulo_mirror_images || keeps_against_mirror(g))
            .collect();
    }
    let mut forms: BTreeMap<Vec<[Vertex; 2]>, i8> = BTreeMap::new();
    for g in labeled {
        let nf = g.normal_form();
        forms.entry(nf.targets).or_insert(nf.sign.abs());
    }
    forms
        .into_iter()
        .map(|(t, s)| KontsevichGraph::from_parts(m, s, t))
        .filter(|g| opts.include_zero || !g.is_zero())
        .filter(|g| !opts.modulo_mirror_images || keeps_against_mirror(g))
        .collect()
}

/// Mirror-representative test: the normal form of `g` is not larger than the
/// normal form of its mirror image. Graphs equal to their mirror are kept.
fn keeps_against_mirror(g: &KontsevichGraph) -> bool {
    match g.mirror_image() {
        Ok(mirror) => g.normal_form().targets <= mirror.normal_form().targets,
        Err(_) => true,
    }
}
