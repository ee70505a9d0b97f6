//! The weight integrand of a two-sink graph as the Jacobian determinant of
//! its angle map, exact zero detection, and Monte Carlo weight estimates.
//!
//! Internal vertex `j` sits at `p_j = x_j + i·y_j` in the upper half-plane,
//! sink 0 at the origin and sink 1 at 1. For an edge from `p = a + ib` to
//! `q = x + iy` the angle is, up to a constant,
//! `arctan(N/D)` with `N = 2b(a-x)` and `D = (a-x)² + y² - b²`, so each
//! partial derivative is `(D·∂N - N·∂D)/(N² + D²)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution};

use crate::coeffs::Rational;
use crate::graph::KontsevichGraph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("weight integrands need two sinks, found {0}")]
    NotTwoSinks(usize),
    #[error("weight integrands need at least one internal vertex")]
    NoInternalVertices,
}

fn check(g: &KontsevichGraph) -> Result<(), WeightError> {
    if g.sinks() != 2 {
        return Err(WeightError::NotTwoSinks(g.sinks()));
    }
    if g.internal() == 0 {
        return Err(WeightError::NoInternalVertices);
    }
    Ok(())
}

/// Arithmetic needed to fill the Jacobian matrix.
trait Field: Clone {
    fn zero() -> Self;
    fn int(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
}

impl Field for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn int(n: i64) -> Self {
        Rational::from_integer(n)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn int(n: i64) -> Self {
        n as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

/// Jacobian of the angle map at `points[j] = (x_j, y_j)`, row-major `2k × 2k`.
fn jacobian<T: Field>(g: &KontsevichGraph, points: &[(T, T)]) -> Vec<T> {
    let k = g.internal();
    let dim = 2 * k;
    let mut m = alloc::vec![T::zero(); dim * dim];
    let two = T::int(2);
    for (j, pair) in g.targets().iter().enumerate() {
        let (a, b) = points[j].clone();
        for (side, &t) in pair.iter().enumerate() {
            let row = 2 * j + side;
            let t = t as usize;
            if t == j + 2 {
                // a loop edge has constant angle, so its row stays zero
                continue;
            }
            let (x, y, target) = match t {
                0 => (T::int(0), T::int(0), None),
                1 => (T::int(1), T::int(0), None),
                _ => (points[t - 2].0.clone(), points[t - 2].1.clone(), Some(t - 2)),
            };
            let d = a.sub(&x);
            let num = two.mul(&b).mul(&d);
            let den = d.mul(&d).add(&y.mul(&y)).sub(&b.mul(&b));
            let norm = num.mul(&num).add(&den.mul(&den));
            // (∂N, ∂D) with respect to a, b, x, y
            let dn = [two.mul(&b), two.mul(&d), T::zero().sub(&two.mul(&b)), T::zero()];
            let dd = [two.mul(&d), T::zero().sub(&two.mul(&b)), T::zero().sub(&two.mul(&d)), two.mul(&y)];
            let partial = |i: usize| den.mul(&dn[i]).sub(&num.mul(&dd[i])).div(&norm);
            let add = |m: &mut Vec<T>, col: usize, v: T| m[row * dim + col] = m[row * dim + col].add(&v);
            add(&mut m, 2 * j, partial(0));
            add(&mut m, 2 * j + 1, partial(1));
            if let Some(q) = target {
                add(&mut m, 2 * q, partial(2));
                add(&mut m, 2 * q + 1, partial(3));
            }
        }
    }
    m
}

/// Determinant by Gaussian elimination over the rationals.
fn rational_det(mut m: Vec<Rational>, n: usize) -> Rational {
    let mut det = Rational::ONE;
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r * n + c].is_zero()) else {
            return Rational::ZERO;
        };
        if p != c {
            for j in 0..n {
                m.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let pivot = m[c * n + c].clone();
        det = &det * &pivot;
        let inv = pivot.recip().expect("nonzero pivot");
        for r in c + 1..n {
            let f = &m[r * n + c] * &inv;
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let v = &m[r * n + j] - &(&f * &m[c * n + j]);
                m[r * n + j] = v;
            }
        }
    }
    det
}

/// Determinant by LU with partial pivoting.
fn float_det(mut m: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a * n + c].abs().total_cmp(&m[b * n + c].abs()))
            .expect("nonempty range");
        if m[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..n {
                m.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let pivot = m[c * n + c];
        det *= pivot;
        for r in c + 1..n {
            let f = m[r * n + c] / pivot;
            for j in c..n {
                m[r * n + j] -= f * m[c * n + j];
            }
        }
    }
    det
}

/// The integrand (without the `(2π)^{-2k}` factor) at a configuration of
/// rational points; `None` if two points coincide.
pub fn integrand_exact(g: &KontsevichGraph, points: &[(Rational, Rational)]) -> Result<Option<Rational>, WeightError> {
    check(g)?;
    assert_eq!(points.len(), g.internal());
    for (i, p) in points.iter().enumerate() {
        if p.1.signum() <= 0 {
            return Ok(None);
        }
        if points[..i].contains(p) {
            return Ok(None);
        }
    }
    let n = 2 * g.internal();
    Ok(Some(rational_det(jacobian(g, points), n)))
}

/// The integrand (without the `(2π)^{-2k}` factor) in floating point.
pub fn integrand_f64(g: &KontsevichGraph, points: &[(f64, f64)]) -> Result<f64, WeightError> {
    check(g)?;
    let n = 2 * g.internal();
    Ok(float_det(jacobian(g, points), n))
}

/// Draws a rational point with numerator and denominator below 100.
fn random_point<R: Rng + ?Sized>(rng: &mut R) -> (Rational, Rational) {
    let x = Rational::new(rng.random_range(-200..=300), rng.random_range(1..=100));
    let y = Rational::new(rng.random_range(1..=300), rng.random_range(1..=100));
    (x, y)
}

/// Whether the integrand vanishes at `trials` random rational
/// configurations. A `false` answer is certain; `true` may in principle
/// miss a nonzero integrand that happens to vanish at every sample.
pub fn is_integrand_zero(g: &KontsevichGraph, trials: usize, seed: u64) -> Result<bool, WeightError> {
    check(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = g.internal();
    let mut done = 0;
    while done < trials {
        let points: Vec<_> = (0..k).map(|_| random_point(&mut rng)).collect();
        if let Some(v) = integrand_exact(g, &points)? {
            if !v.is_zero() {
                return Ok(false);
            }
            done += 1;
        }
    }
    Ok(true)
}

/// Running sums of importance weights.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MonteCarloSums {
    pub samples: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MonteCarloSums {
    pub fn merge(&mut self, other: &MonteCarloSums) {
        self.samples += other.samples;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    /// `(mean, standard error of the mean)`.
    pub fn estimate(&self) -> (f64, f64) {
        let n = self.samples as f64;
        if self.samples == 0 {
            return (0.0, f64::INFINITY);
        }
        let mean = self.sum / n;
        let var = if self.samples > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            f64::INFINITY
        };
        (mean, libm::sqrt(var / n))
    }
}

/// Importance-sampling sums for `samples` draws from stream `stream` of
/// `seed`. Each point has `x` Cauchy around 1/2 with unit scale and
/// `ln y` standard Cauchy; the heavy tail of `ln y` near 0 matches the
/// `1/r` growth of the integrand at the sinks, which keeps the variance
/// finite.
pub fn monte_carlo_sums(g: &KontsevichGraph, samples: u64, seed: u64, stream: u64) -> Result<MonteCarloSums, WeightError> {
    check(g)?;
    let k = g.internal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let cx = Cauchy::new(0.5, 1.0).expect("valid scale");
    let cl = Cauchy::new(0.0, 1.0).expect("valid scale");
    let norm = libm::pow(2.0 * PI, (2 * k) as f64);
    let mut out = MonteCarloSums::default();
    let mut points = alloc::vec![(0.0, 0.0); k];
    for _ in 0..samples {
        let mut density = 1.0;
        let mut finite = true;
        for p in points.iter_mut() {
            let x: f64 = cx.sample(&mut rng);
            let l: f64 = cl.sample(&mut rng);
            let y = libm::exp(l);
            let dx = x - 0.5;
            density *= 1.0 / (PI * (1.0 + dx * dx)) / (PI * y * (1.0 + l * l));
            finite &= y.is_finite() && y > 0.0 && x.is_finite();
            *p = (x, y);
        }
        let v = if finite && density > 0.0 && density.is_finite() {
            let f = integrand_f64(g, &points)? / norm / density;
            if f.is_finite() {
                f
            } else {
                0.0
            }
        } else {
            0.0
        };
        out.samples += 1;
        out.sum += v;
        out.sum_sq += v * v;
    }
    Ok(out)
}

/// Estimate of the weight with its standard error.
pub fn monte_carlo_weight(g: &KontsevichGraph, samples: u64, seed: u64) -> Result<(f64, f64), WeightError> {
    Ok(monte_carlo_sums(g, samples, seed, 0)?.estimate())
}

/// The integrand as `Det[{{...}, ...}]` with exact rational-function
/// entries in the variables `x1, y1, ..., xk, yk`.
pub fn integrand_text(g: &KontsevichGraph) -> Result<String, WeightError> {
    check(g)?;
    let k = g.internal();
    let var = |t: usize| -> (String, String) {
        match t {
            0 => ("0".into(), "0".into()),
            1 => ("1".into(), "0".into()),
            _ => (alloc::format!("x{}", t - 1), alloc::format!("y{}", t - 1)),
        }
    };
    let mut rows: Vec<Vec<String>> = alloc::vec![alloc::vec![String::from("0"); 2 * k]; 2 * k];
    for (j, pair) in g.targets().iter().enumerate() {
        let (a, b) = var(j + 2);
        for (side, &t) in pair.iter().enumerate() {
            let t = t as usize;
            let (x, y) = var(t);
            let d = alloc::format!("({a} - {x})");
            let num = alloc::format!("(2*{b}*{d})");
            let den = alloc::format!("({d}^2 + {y}^2 - {b}^2)");
            let norm = alloc::format!("({num}^2 + {den}^2)");
            let dn = [alloc::format!("2*{b}"), alloc::format!("2*{d}"), alloc::format!("(-2*{b})"), String::from("0")];
            let dd = [alloc::format!("2*{d}"), alloc::format!("(-2*{b})"), alloc::format!("(-2*{d})"), alloc::format!("2*{y}")];
            let partial = |i: usize| alloc::format!("({den}*{} - {num}*{})/{norm}", dn[i], dd[i]);
            let row = &mut rows[2 * j + side];
            row[2 * j] = partial(0);
            row[2 * j + 1] = partial(1);
            if t >= 2 {
                let q = t - 2;
                if q == j {
                    row[2 * j] = alloc::format!("{} + {}", row[2 * j], partial(2));
                    row[2 * j + 1] = alloc::format!("{} + {}", row[2 * j + 1], partial(3));
                } else {
                    row[2 * q] = partial(2);
                    row[2 * q + 1] = partial(3);
                }
            }
        }
    }
    let mut out = String::from("Det[{");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{{{}}}", row.join(", "));
    }
    out.push_str("}]");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::decode;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn wedge_integrand_closed_form() {
        let g = decode("2 1 1 0 1").unwrap();
        for (x, y) in [(q(1, 3), q(2, 5)), (q(-7, 2), q(1, 9)), (q(5, 4), q(3, 1))] {
            let v = integrand_exact(&g, &[(x.clone(), y.clone())]).unwrap().unwrap();
            let r0 = &(&x * &x) + &(&y * &y);
            let x1 = &x - &Rational::ONE;
            let r1 = &(&x1 * &x1) + &(&y * &y);
            let expected = &(&Rational::from_integer(4) * &y) / &(&r0 * &r1);
            assert_eq!(v, expected);
        }
        assert!(!is_integrand_zero(&g, 3, 1).unwrap());
    }

    #[test]
    fn double_edge_vanishes() {
        let g = decode("2 2 1 0 1 2 2").unwrap();
        assert!(is_integrand_zero(&g, 5, 2).unwrap());
        let tadpole = decode("2 2 1 0 1 3 3").unwrap();
        assert!(is_integrand_zero(&tadpole, 5, 2).unwrap());
    }

    #[test]
    fn float_and_exact_agree() {
        let g = decode("2 2 1 0 3 2 1").unwrap();
        let pts = [(q(1, 3), q(2, 5)), (q(3, 2), q(7, 4))];
        let exact = integrand_exact(&g, &pts).unwrap().unwrap().to_f64();
        let float = integrand_f64(&g, &[(1.0 / 3.0, 0.4), (1.5, 1.75)]).unwrap();
        assert!((exact - float).abs() <= 1e-9 * exact.abs().max(1.0));
    }

    #[test]
    fn wedge_monte_carlo() {
        let (est, se) = monte_carlo_weight(&decode("2 1 1 0 1").unwrap(), 20_000, 3).unwrap();
        assert!((est - 0.5).abs() < 4.0 * se, "{est} ± {se}");
    }

    #[test]
    fn text_export() {
        let t = integrand_text(&decode("2 1 1 0 1").unwrap()).unwrap();
        assert!(t.starts_with("Det[{{"));
        assert_eq!(t.matches('{').count(), 3);
    }
}
