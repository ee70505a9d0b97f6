use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::coeffs::Rational;

/// Largest supported number of base coordinates.
pub const MAX_DIM: usize = 9;

/// A derivative `ψ_α` of a functional parameter, packed for cheap sorting:
/// the parameter in the top byte, then one byte per coordinate of `α`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Jet(u128);

impl Jet {
    pub fn new(param: u8, alpha: &[u8]) -> Jet {
        assert!(alpha.len() <= MAX_DIM);
        let mut code = (param as u128) << (8 * MAX_DIM);
        for (i, &a) in alpha.iter().enumerate() {
            code |= (a as u128) << (8 * (MAX_DIM - 1 - i));
        }
        Jet(code)
    }

    pub fn param(self) -> u8 {
        (self.0 >> (8 * MAX_DIM)) as u8
    }

    pub fn order(self, i: usize) -> u8 {
        (self.0 >> (8 * (MAX_DIM - 1 - i))) as u8
    }

    fn bumped(self, i: usize) -> Jet {
        assert!(self.order(i) < u8::MAX, "derivative order overflow");
        Jet(self.0 + (1u128 << (8 * (MAX_DIM - 1 - i))))
    }
}

/// Monomial: Laurent powers of the coordinates times a sorted multiset of jets.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial {
    pub coords: [i16; MAX_DIM],
    pub jets: Vec<Jet>,
}

impl Monomial {
    fn mul(&self, other: &Monomial) -> Monomial {
        let mut coords = self.coords;
        for (c, o) in coords.iter_mut().zip(other.coords.iter()) {
            *c += *o;
        }
        let mut jets = Vec::with_capacity(self.jets.len() + other.jets.len());
        let (mut i, mut j) = (0, 0);
        while i < self.jets.len() && j < other.jets.len() {
            if self.jets[i] <= other.jets[j] {
                jets.push(self.jets[i]);
                i += 1;
            } else {
                jets.push(other.jets[j]);
                j += 1;
            }
        }
        jets.extend_from_slice(&self.jets[i..]);
        jets.extend_from_slice(&other.jets[j..]);
        Monomial { coords, jets }
    }
}

/// Differential polynomial in `dim` coordinates: a finite sum of rational
/// multiples of monomials, with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetPoly {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl JetPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        JetPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(Monomial::default(), c);
        p
    }

    /// `c · x_i^e`.
    pub fn coord_power(dim: usize, i: usize, e: i16, c: Rational) -> Self {
        let mut m = Monomial::default();
        m.coords[i] = e;
        let mut p = Self::zero(dim);
        p.add_term(m, c);
        p
    }

    /// The jet variable `ψ_α` of parameter `param`.
    pub fn jet(dim: usize, param: u8, alpha: &[u8]) -> Self {
        let m = Monomial {
            coords: [0; MAX_DIM],
            jets: alloc::vec![Jet::new(param, alpha)],
        };
        let mut p = Self::zero(dim);
        p.add_term(m, Rational::ONE);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &JetPoly, c: &Rational) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn add(&self, other: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::ONE);
        out
    }

    pub fn sub(&self, other: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::from_integer(-1));
        out
    }

    pub fn scale(&self, c: &Rational) -> JetPoly {
        let mut out = JetPoly::zero(self.dim);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        }
        out
    }

    pub fn mul(&self, other: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Total derivative with respect to coordinate `i`.
    pub fn derivative(&self, i: usize) -> JetPoly {
        assert!(i < self.dim);
        let mut out = JetPoly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.coords[i];
            if e != 0 {
                let mut m2 = m.clone();
                m2.coords[i] -= 1;
                out.add_term(m2, c * &Rational::from_integer(e as i64));
            }
            let mut k = 0;
            while k < m.jets.len() {
                let jet = m.jets[k];
                let mult = m.jets[k..].iter().take_while(|&&j| j == jet).count();
                let mut jets = m.jets.clone();
                jets.remove(k);
                let bumped = jet.bumped(i);
                let pos = jets.partition_point(|&j| j < bumped);
                jets.insert(pos, bumped);
                out.add_term(
                    Monomial {
                        coords: m.coords,
                        jets,
                    },
                    c * &Rational::from_integer(mult as i64),
                );
                k += mult;
            }
        }
        out
    }

    /// Value at a point, with `jet_value` supplying every jet variable.
    /// Returns `None` if a negative power of a zero coordinate occurs.
    pub fn evaluate<F>(&self, coords: &[Rational], mut jet_value: F) -> Option<Rational>
    where
        F: FnMut(u8, &[u8]) -> Rational,
    {
        let mut total = Rational::ZERO;
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for i in 0..self.dim {
                if m.coords[i] != 0 {
                    v = &v * &coords[i].pow(m.coords[i] as i32).ok()?;
                }
            }
            for jet in &m.jets {
                let alpha: Vec<u8> = (0..self.dim).map(|i| jet.order(i)).collect();
                v = &v * &jet_value(jet.param(), &alpha);
            }
            total += &v;
        }
        Some(total)
    }

    /// Text form such as `-2*x*q_xz*p + r^(-1)`, using the given names.
    pub fn render(&self, coords: &[&str], params: &[&str]) -> String {
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for i in 0..self.dim {
                match m.coords[i] {
                    0 => {}
                    1 => factors.push(String::from(coords[i])),
                    e if e > 0 => factors.push(alloc::format!("{}^{e}", coords[i])),
                    e => factors.push(alloc::format!("{}^({e})", coords[i])),
                }
            }
            for jet in &m.jets {
                let mut s = String::from(params[jet.param() as usize]);
                let mut first = true;
                for i in 0..self.dim {
                    for _ in 0..jet.order(i) {
                        if first {
                            s.push('_');
                            first = false;
                        }
                        s.push_str(coords[i]);
                    }
                }
                factors.push(s);
            }
            let neg = c.is_negative();
            let a = c.abs();
            if k > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            if factors.is_empty() {
                let _ = write!(out, "{a}");
            } else {
                if !a.is_one() {
                    let _ = write!(out, "{a}*");
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn derivatives() {
        let p = JetPoly::coord_power(2, 0, -1, r(1));
        assert_eq!(p.derivative(0), JetPoly::coord_power(2, 0, -2, r(-1)));
        let q = JetPoly::jet(3, 1, &[0, 0, 1]);
        let qq = q.mul(&q);
        assert_eq!(qq.derivative(0), JetPoly::jet(3, 1, &[1, 0, 1]).mul(&q).scale(&r(2)));
        assert_eq!(qq.render(&["x", "y", "z"], &["p", "q"]), "q_z*q_z");
    }

    #[test]
    fn rendering() {
        let p = JetPoly::coord_power(2, 0, -1, r(1));
        assert_eq!(p.render(&["r", "t"], &[]), "r^(-1)");
        assert_eq!(p.scale(&r(-1)).render(&["r", "t"], &[]), "-r^(-1)");
        let s = p.add(&JetPoly::constant(2, r(-3)));
        assert_eq!(s.render(&["r", "t"], &[]), "r^(-1) - 3");
        assert_eq!(JetPoly::zero(2).render(&["r", "t"], &[]), "0");
    }
}
