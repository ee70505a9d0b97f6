use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use super::{CoeffError, Rational};

/// Name of an indeterminate such as `w_4_103` or `c_1_513_211`.
pub type Symbol = Arc<str>;

/// Affine expression `constant + Σ coefficient·name` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct CoeffExpr {
    constant: Rational,
    terms: BTreeMap<Symbol, Rational>,
}

/// What [`CoeffExpr::coefficient_of`] looks for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// The distinguished unit symbol `1`, selecting the constant part.
    Unit,
    Name(String),
}

impl FromStr for Target {
    type Err = CoeffError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" {
            Ok(Target::Unit)
        } else if is_ident(s) {
            Ok(Target::Name(s.to_string()))
        } else {
            Err(CoeffError::Syntax {
                pos: 0,
                msg: String::from("target must be an indeterminate name or 1"),
            })
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut b = s.bytes();
    matches!(b.next(), Some(c) if c.is_ascii_alphabetic() || c == b'_')
        && b.all(|c| c.is_ascii_alphanumeric() || c == b'_')
}

impl CoeffExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::ONE)
    }

    pub fn constant(c: Rational) -> Self {
        CoeffExpr {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    /// The expression consisting of the single indeterminate `name`.
    pub fn var(name: impl Into<Symbol>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.into(), Rational::ONE);
        CoeffExpr {
            constant: Rational::ZERO,
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if no indeterminates occur.
    pub fn as_constant(&self) -> Option<&Rational> {
        self.terms.is_empty().then_some(&self.constant)
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    /// Indeterminates with their (nonzero) coefficients, sorted by name.
    pub fn terms(&self) -> impl Iterator<Item = (&Symbol, &Rational)> {
        self.terms.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &Symbol> {
        self.terms.keys()
    }

    pub fn coefficient_of(&self, target: &Target) -> Rational {
        match target {
            Target::Unit => self.constant.clone(),
            Target::Name(n) => self
                .terms
                .get(n.as_str())
                .cloned()
                .unwrap_or(Rational::ZERO),
        }
    }

    /// Coefficient of one name, if present.
    pub fn coefficient(&self, name: &str) -> Option<&Rational> {
        self.terms.get(name)
    }

    /// Adds `c·name` in place.
    pub fn add_term(&mut self, name: &Symbol, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(name) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(name);
                }
            }
            None => {
                self.terms.insert(name.clone(), c.clone());
            }
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &CoeffExpr, c: &Rational) {
        if c.is_zero() {
            return;
        }
        self.constant += &(&other.constant * c);
        for (n, v) in &other.terms {
            self.add_term(n, &(v * c));
        }
    }

    pub fn scale(&self, c: &Rational) -> CoeffExpr {
        if c.is_zero() {
            return CoeffExpr::zero();
        }
        CoeffExpr {
            constant: &self.constant * c,
            terms: self.terms.iter().map(|(n, v)| (n.clone(), v * c)).collect(),
        }
    }

    /// Product, defined only when at least one factor is constant.
    pub fn try_mul(&self, other: &CoeffExpr) -> Result<CoeffExpr, CoeffError> {
        if let Some(c) = other.as_constant() {
            Ok(self.scale(c))
        } else if let Some(c) = self.as_constant() {
            Ok(other.scale(c))
        } else {
            Err(CoeffError::Nonlinear(format_product(self, other)))
        }
    }

    /// Replaces every bound name by its image.
    pub fn substitute<F>(&self, mut lookup: F) -> CoeffExpr
    where
        F: FnMut(&str) -> Option<CoeffExpr>,
    {
        let mut out = CoeffExpr::constant(self.constant.clone());
        for (n, v) in &self.terms {
            match lookup(n) {
                Some(e) => out.add_scaled(&e, v),
                None => out.add_term(n, v),
            }
        }
        out
    }

    pub fn substitute_map(&self, bindings: &BTreeMap<Symbol, CoeffExpr>) -> CoeffExpr {
        self.substitute(|n| bindings.get(n).cloned())
    }

    /// Representative of the line through `self`: scaled so that the first
    /// indeterminate (or the constant, if there is none) has coefficient 1.
    /// Two equations `e == 0` are equivalent up to scaling iff their
    /// representatives agree.
    pub fn monic(&self) -> CoeffExpr {
        let lead = match self.terms.values().next() {
            Some(c) => c.clone(),
            None if self.constant.is_zero() => return CoeffExpr::zero(),
            None => self.constant.clone(),
        };
        self.scale(&lead.recip().expect("leading coefficient is nonzero"))
    }
}

fn format_product(a: &CoeffExpr, b: &CoeffExpr) -> String {
    let mut s = String::new();
    let _ = fmt::write(&mut s, format_args!("({a})*({b})"));
    s
}

impl From<Rational> for CoeffExpr {
    fn from(c: Rational) -> Self {
        CoeffExpr::constant(c)
    }
}

impl From<i64> for CoeffExpr {
    fn from(c: i64) -> Self {
        CoeffExpr::constant(Rational::from_integer(c))
    }
}

impl AddAssign<&CoeffExpr> for CoeffExpr {
    fn add_assign(&mut self, rhs: &CoeffExpr) {
        self.add_scaled(rhs, &Rational::ONE);
    }
}

impl SubAssign<&CoeffExpr> for CoeffExpr {
    fn sub_assign(&mut self, rhs: &CoeffExpr) {
        self.add_scaled(rhs, &Rational::from_integer(-1));
    }
}

impl Add for &CoeffExpr {
    type Output = CoeffExpr;
    fn add(self, rhs: &CoeffExpr) -> CoeffExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &CoeffExpr {
    type Output = CoeffExpr;
    fn sub(self, rhs: &CoeffExpr) -> CoeffExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &CoeffExpr {
    type Output = CoeffExpr;
    fn neg(self) -> CoeffExpr {
        self.scale(&Rational::from_integer(-1))
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (name, c) in &self.terms {
            let neg = c.is_negative();
            if neg {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            let a = c.abs();
            if a.is_one() {
                f.write_str(name)?;
            } else {
                write!(f, "{a}*{name}")?;
            }
            first = false;
        }
        if !self.constant.is_zero() {
            if !first && !self.constant.is_negative() {
                f.write_str("+")?;
            }
            write!(f, "{}", self.constant)?;
        }
        Ok(())
    }
}

impl fmt::Debug for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CoeffExpr {
    type Err = CoeffError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_coeff(s)
    }
}

/// Parses an affine coefficient expression.
///
/// Besides the plain `TERM (('+'|'-') TERM)*` grammar this accepts
/// `/INTEGER` anywhere in a product (as in `8/3*w_4_6`) and parenthesized
/// sub-expressions (as in `(3*w_4_108)/2`), as long as the result stays
/// affine.
pub fn parse_coeff(text: &str) -> Result<CoeffExpr, CoeffError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> CoeffError {
        CoeffError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<CoeffExpr, CoeffError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            if op == b'+' {
                acc += &t;
            } else {
                acc -= &t;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<CoeffExpr, CoeffError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.unary()?;
                    acc = acc.try_mul(&f)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let f = self.unary()?;
                    let d = f
                        .as_constant()
                        .ok_or_else(|| CoeffError::Nonlinear(String::from("division by an indeterminate")))?;
                    acc = acc.scale(&d.recip()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<CoeffExpr, CoeffError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<CoeffExpr, CoeffError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E')) {
                    let end = self.src[self.pos..]
                        .iter()
                        .position(|b| !(b.is_ascii_alphanumeric() || *b == b'.'))
                        .map_or(self.src.len(), |k| self.pos + k);
                    let lit = core::str::from_utf8(&self.src[start..end]).unwrap_or("?");
                    return Err(CoeffError::FloatLiteral(lit.to_string()));
                }
                let lit = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                Ok(CoeffExpr::constant(lit.parse()?))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
                Ok(CoeffExpr::var(name))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

/// Parses a relation `LHS==RHS` into the single expression `LHS - RHS`.
pub fn parse_relation(text: &str) -> Result<CoeffExpr, CoeffError> {
    let (l, r) = text
        .split_once("==")
        .ok_or_else(|| CoeffError::Syntax {
            pos: 0,
            msg: String::from("expected '=='"),
        })?;
    Ok(&parse_coeff(l)? - &parse_coeff(r)?)
}

/// Parses a binding `NAME==EXPR`.
pub fn parse_binding(text: &str) -> Result<(Symbol, CoeffExpr), CoeffError> {
    let (l, r) = text.split_once("==").ok_or_else(|| CoeffError::Syntax {
        pos: 0,
        msg: String::from("expected '=='"),
    })?;
    let name = l.trim();
    if !is_ident(name) {
        return Err(CoeffError::Syntax {
            pos: 0,
            msg: String::from("left side of a binding must be a name"),
        });
    }
    Ok((Symbol::from(name), parse_coeff(r)?))
}

/// Sorted list of every indeterminate occurring in `exprs`, without repeats.
pub fn collect_names<'a, I: IntoIterator<Item = &'a CoeffExpr>>(exprs: I) -> Vec<Symbol> {
    let mut set = alloc::collections::BTreeSet::new();
    for e in exprs {
        set.extend(e.names().cloned());
    }
    set.into_iter().collect()
}
