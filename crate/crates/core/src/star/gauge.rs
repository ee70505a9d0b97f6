use super::StarError;
use crate::coeffs::{CoeffExpr, Rational};
use crate::graph::KontsevichGraph;
use crate::series::{insert_series, Accumulator, GraphSeries, GraphSum};

fn check_start(t: &GraphSeries) -> Result<(), StarError> {
    if let Some(m) = t.sinks()? {
        if m != 1 {
            return Err(StarError::WrongSinks { expected: 1, found: m });
        }
    }
    let start = t.get(0).reduce_mod_skew()?;
    match start.terms() {
        [(c, g)] if *c == CoeffExpr::one() && *g == KontsevichGraph::bare(1) => Ok(()),
        _ => Err(StarError::BadGaugeStart),
    }
}

/// Left inverse of a gauge transformation `t = • + O(ħ)` up to its
/// precision: `γ_0 = •` and `γ_m = -Σ_{k<m} γ_k(t_{m-k})`.
pub fn gauge_inverse(t: &GraphSeries) -> Result<GraphSeries, StarError> {
    check_start(t)?;
    let p = t.precision();
    let mut inv = GraphSeries::new(p);
    inv.set(0, GraphSum::single(CoeffExpr::one(), KontsevichGraph::bare(1)));
    let neg = Rational::from_integer(-1);
    for m in 1..=p {
        let mut acc = Accumulator::new();
        for k in 0..m {
            let part = GraphSum::insert(inv.get(k), &[t.get(m - k)])?;
            for (c, g) in part.terms() {
                acc.add(&c.scale(&neg), g);
            }
        }
        inv.set(m, acc.finish());
    }
    Ok(inv)
}

/// The gauged product `f ⋆' g = t⁻¹(t(f) ⋆ t(g))`.
///
/// A gauge series of lower degree than the star counts as padded with zero
/// components, so the result keeps the precision of `star`.
pub fn gauge_transform(star: &GraphSeries, t: &GraphSeries) -> Result<GraphSeries, StarError> {
    check_start(t)?;
    let p = star.precision();
    let mut t = t.clone();
    t.pad_to(p);
    t.truncate(p);
    let composed = insert_series(star, &[&t, &t], p)?;
    let inv = gauge_inverse(&t)?;
    Ok(insert_series(&inv, &[&composed], p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::parse_coeff;
    use crate::graph::decode;
    use alloc::collections::BTreeMap;

    fn loop_gauge() -> GraphSeries {
        let mut powers = BTreeMap::new();
        powers.insert(0, GraphSum::single(CoeffExpr::one(), decode("1 0 1").unwrap()));
        powers.insert(
            2,
            GraphSum::single(parse_coeff("1/12").unwrap(), decode("1 2 1 0 2 1 0").unwrap()),
        );
        GraphSeries::from_powers(powers)
    }

    #[test]
    fn inverse_of_loop() {
        let inv = gauge_inverse(&loop_gauge()).unwrap();
        assert!(inv.get(1).is_empty());
        let expected = GraphSum::single(parse_coeff("-1/12").unwrap(), decode("1 2 1 0 2 1 0").unwrap());
        assert_eq!(inv.get(2), &expected.reduce_mod_skew().unwrap());
        let id = GraphSeries::identity(1, 2);
        assert_eq!(gauge_inverse(&id).unwrap(), id);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let t = loop_gauge();
        let inv = gauge_inverse(&t).unwrap();
        let both = insert_series(&inv, &[&t], 2).unwrap();
        assert_eq!(both.reduce_mod_skew().unwrap(), GraphSeries::identity(1, 2));
    }
}
