use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::jet::JetPoly;
use super::PoissonError;
use crate::coeffs::Rational;

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 4] = ["2d-polar", "3d-generic", "3d-polynomial", "2d-polynomial-generic"];

/// A skew-symmetric matrix `P^{ij}` of differential polynomials in the
/// coordinates and in the jets of the functional parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    name: String,
    coords: Vec<String>,
    params: Vec<String>,
    matrix: Vec<JetPoly>,
}

impl PoissonStructure {
    /// Builds the structure from its strict upper triangle, given row by row
    /// as `P^{12}, P^{13}, ..., P^{23}, ...`.
    pub fn from_upper(name: &str, coords: &[&str], params: &[&str], upper: Vec<JetPoly>) -> Self {
        let d = coords.len();
        assert_eq!(upper.len(), d * (d - 1) / 2, "wrong number of upper-triangle entries");
        let mut matrix = alloc::vec![JetPoly::zero(d); d * d];
        let mut it = upper.into_iter();
        for i in 0..d {
            for j in i + 1..d {
                let e = it.next().expect("length checked");
                matrix[j * d + i] = e.scale(&Rational::from_integer(-1));
                matrix[i * d + j] = e;
            }
        }
        PoissonStructure {
            name: name.to_string(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            params: params.iter().map(|s| s.to_string()).collect(),
            matrix,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> Vec<&str> {
        self.coords.iter().map(String::as_str).collect()
    }

    pub fn params(&self) -> Vec<&str> {
        self.params.iter().map(String::as_str).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> &JetPoly {
        &self.matrix[i * self.dim() + j]
    }

    /// Renders a polynomial with this structure's variable names.
    pub fn render(&self, p: &JetPoly) -> String {
        p.render(&self.coords(), &self.params())
    }

    /// The matrix as `[[a, b]\n[c, d]]`.
    pub fn matrix_string(&self) -> String {
        let d = self.dim();
        let rows: Vec<String> = (0..d)
            .map(|i| {
                let cells: Vec<String> = (0..d).map(|j| self.render(self.entry(i, j))).collect();
                alloc::format!("[{}]", cells.join(", "))
            })
            .collect();
        alloc::format!("[{}]", rows.join("\n"))
    }

    /// `Σ_l ∂_l P^{ij} P^{lk} + ∂_l P^{jk} P^{li} + ∂_l P^{ki} P^{lj}`.
    pub fn jacobiator_entry(&self, i: usize, j: usize, k: usize) -> JetPoly {
        let mut out = JetPoly::zero(self.dim());
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            for l in 0..self.dim() {
                let t = self.entry(a, b).derivative(l).mul(self.entry(l, c));
                out.add_scaled(&t, &Rational::ONE);
            }
        }
        out
    }

    /// True when every component of the Jacobiator vanishes identically.
    pub fn satisfies_jacobi(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| (0..d).all(|k| self.jacobiator_entry(i, j, k).is_zero())))
    }
}

/// Looks up a named structure.
///
/// * `2d-polar`: `P^{rt} = r^(-1)`.
/// * `3d-generic`: `P^{ij} = p·ε^{ijk}·∂_k q` for functional parameters `p`, `q`.
/// * `3d-polynomial`: the previous entry with `p = 1` and `q = xyz`.
/// * `2d-polynomial-generic`: `P^{xy} = u` for a functional parameter `u`.
pub fn catalog(name: &str) -> Result<PoissonStructure, PoissonError> {
    let one = Rational::ONE;
    let neg = Rational::from_integer(-1);
    let s = match name {
        "2d-polar" => PoissonStructure::from_upper(name, &["r", "t"], &[], alloc::vec![JetPoly::coord_power(2, 0, -1, one)]),
        "3d-generic" => {
            let p = JetPoly::jet(3, 0, &[0, 0, 0]);
            let dq = |k: usize| {
                let mut alpha = [0u8; 3];
                alpha[k] = 1;
                p.mul(&JetPoly::jet(3, 1, &alpha))
            };
            PoissonStructure::from_upper(name, &["x", "y", "z"], &["p", "q"], alloc::vec![dq(2), dq(1).scale(&neg), dq(0)])
        }
        "3d-polynomial" => {
            let x = JetPoly::coord_power(3, 0, 1, one.clone());
            let y = JetPoly::coord_power(3, 1, 1, one.clone());
            let z = JetPoly::coord_power(3, 2, 1, one);
            PoissonStructure::from_upper(name, &["x", "y", "z"], &[], alloc::vec![x.mul(&y), x.mul(&z).scale(&neg), y.mul(&z)])
        }
        "2d-polynomial-generic" => PoissonStructure::from_upper(name, &["x", "y"], &["u"], alloc::vec![JetPoly::jet(2, 0, &[0, 0])]),
        _ => return Err(PoissonError::UnknownStructure(name.to_string())),
    };
    Ok(s)
}
