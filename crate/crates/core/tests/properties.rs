use std::collections::BTreeMap;

use kgraph_core::coeffs::{parse_coeff, CoeffExpr, Rational, Symbol};
use kgraph_core::graph::KontsevichGraph;
use kgraph_core::linsolve::{verify_solution, LinearSystem};
use kgraph_core::poisson::{catalog, Evaluator, JetPoly};
use kgraph_core::weightnum::integrand_exact;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d))
}

/// Graph on two sinks with `1..=max_k` internal vertices and no loop edges.
fn graph(max_k: usize) -> impl Strategy<Value = KontsevichGraph> {
    (1..=max_k)
        .prop_flat_map(|k| {
            let pairs = (0..k)
                .map(|j| {
                    let others: Vec<u8> = (0..(2 + k) as u8).filter(|&t| t as usize != j + 2).collect();
                    (prop::sample::select(others.clone()), prop::sample::select(others)).prop_map(|(a, b)| [a, b])
                })
                .collect::<Vec<_>>();
            pairs
        })
        .prop_map(|targets| KontsevichGraph::new(2, 1, targets).unwrap())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn graph_with_action(max_k: usize) -> impl Strategy<Value = (KontsevichGraph, Vec<usize>, Vec<bool>)> {
    graph(max_k).prop_flat_map(|g| {
        let n = g.internal();
        (Just(g), permutation(n), prop::collection::vec(any::<bool>(), n))
    })
}

fn points(k: usize) -> impl Strategy<Value = Vec<(Rational, Rational)>> {
    prop::collection::vec(
        ((-40i64..=60, 1i64..=9), (1i64..=40, 1i64..=9)).prop_map(|((a, b), (c, d))| (Rational::new(a, b), Rational::new(c, d))),
        k,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficients_round_trip(c in rational(), terms in prop::collection::vec(("[a-z]_[0-9]", rational()), 0..4)) {
        let mut e = CoeffExpr::constant(c);
        for (name, v) in &terms {
            e.add_term(&Symbol::from(name.as_str()), v);
        }
        let text = e.to_string();
        prop_assert_eq!(parse_coeff(&text).unwrap(), e);
    }

    #[test]
    fn normal_form_is_canonical((g, perm, swaps) in graph_with_action(4)) {
        let nf = g.normal_form();
        prop_assert_eq!(nf.normal_form(), nf.clone());
        prop_assert_eq!(g.act(&perm, &swaps).normal_form(), nf);
    }

    #[test]
    fn operator_survives_normal_form((g, perm, swaps) in graph_with_action(3)) {
        for name in ["2d-polar", "3d-polynomial"] {
            let p = catalog(name).unwrap();
            let mut ev = Evaluator::new(&p);
            let direct = ev.graph(&g);
            prop_assert_eq!(&ev.graph(&g.normal_form()), &direct);
            prop_assert_eq!(&ev.graph(&g.act(&perm, &swaps)), &direct);
        }
    }

    #[test]
    fn jet_derivatives(a in rational(), b in rational(), e in -3i16..4, alpha in prop::collection::vec(0u8..3, 3)) {
        let f = JetPoly::coord_power(3, 0, e, a).add(&JetPoly::jet(3, 0, &alpha));
        let g = JetPoly::jet(3, 1, &[1, 0, 0]).scale(&b).add(&JetPoly::coord_power(3, 2, 2, Rational::ONE));
        for i in 0..3 {
            let lhs = f.mul(&g).derivative(i);
            let rhs = f.derivative(i).mul(&g).add(&f.mul(&g.derivative(i)));
            prop_assert_eq!(lhs, rhs);
            for j in 0..3 {
                prop_assert_eq!(f.derivative(i).derivative(j), f.derivative(j).derivative(i));
            }
        }
    }

    #[test]
    fn linear_solutions_verify(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 1..6), x in prop::collection::vec(rational(), 4)) {
        let names = ["a", "b", "c", "d"];
        let eqs: Vec<CoeffExpr> = rows
            .iter()
            .map(|row| {
                let mut e = CoeffExpr::zero();
                let mut rhs = Rational::ZERO;
                for (k, &c) in row.iter().enumerate() {
                    let c = Rational::from_integer(c);
                    e.add_term(&Symbol::from(names[k]), &c);
                    rhs = &rhs + &(&c * &x[k]);
                }
                e.add_constant(&-rhs);
                e
            })
            .collect();
        let sol = LinearSystem::new(eqs.clone()).solve().unwrap();
        prop_assert!(verify_solution(&eqs, &sol.solved));
        let mut point = BTreeMap::new();
        for (k, n) in names.iter().enumerate() {
            point.insert(Symbol::from(*n), CoeffExpr::constant(x[k].clone()));
        }
        for (name, expr) in &sol.solved {
            prop_assert_eq!(expr.substitute_map(&point), CoeffExpr::constant(x[names.iter().position(|n| name.to_string() == *n).unwrap()].clone()));
        }
    }

    #[test]
    fn integrand_symmetries(((g, perm, swaps), pts) in graph_with_action(3).prop_flat_map(|t| { let k = t.0.internal(); (Just(t), points(k)) })) {
        let Some(base) = integrand_exact(&g, &pts).unwrap() else { return Ok(()) };
        // relabeling moves the points along with the vertices
        let acted = g.act(&perm, &swaps);
        let mut moved = pts.clone();
        for (j, p) in pts.iter().enumerate() {
            moved[perm[j]] = p.clone();
        }
        let flips = swaps.iter().filter(|&&s| s).count();
        let sign = if flips % 2 == 0 { base.clone() } else { -base.clone() };
        prop_assert_eq!(integrand_exact(&acted.with_sign(1), &moved).unwrap().unwrap(), sign);

        let k = g.internal();
        let reflected: Vec<_> = pts.iter().map(|(x, y)| (&Rational::ONE - x, y.clone())).collect();
        let mirrored = integrand_exact(&g.mirror_image().unwrap(), &reflected).unwrap().unwrap();
        prop_assert_eq!(mirrored, if k % 2 == 0 { base } else { -base });
    }
}
