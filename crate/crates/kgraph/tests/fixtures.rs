//! Order-4 reference data: symbolic star product, its associator, the
//! Leibniz-graph factorization of one weight component and a gauge that
//! removes four master weights.

use kgraph::io::{read_series, read_substitutions, write_series};
use kgraph_core::coeffs::parse_coeff;
use kgraph_core::graph::decode;
use kgraph_core::leibniz::LeibnizGraph;
use kgraph_core::series::{Accumulator, GraphSeries, GraphSum};
use kgraph_core::star::{associator, build_star_product, gauge_transform, BasicWeightTable, MissingWeight};
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn series(name: &str) -> GraphSeries {
    read_series(&fixture(name), name).unwrap()
}

fn canonical(s: &GraphSum) -> Vec<String> {
    let mut v: Vec<String> = s.reduce_mod_skew().unwrap().terms().iter().map(|(c, g)| format!("{g} {c}")).collect();
    v.sort();
    v
}

/// Known weights up to order 3 and one indeterminate per nonzero basic
/// graph at order 4.
fn symbolic_star4() -> GraphSeries {
    let mut basic = series("basic_weights.txt");
    basic.truncate(3);
    let mut table = BasicWeightTable::from_series(&basic).unwrap();
    table.insert_symbolic(4);
    build_star_product(&table, 4, MissingWeight::Zero).unwrap()
}

#[test]
fn symbolic_star_matches_reference() {
    let star = symbolic_star4();
    let expected = series("star_product4_symbolic.txt");
    for k in 0..=4 {
        assert_eq!(canonical(star.get(k)), canonical(expected.get(k)), "h^{k}");
    }
}

#[test]
fn associator_of_symbolic_star_matches_reference() {
    let a = associator(&symbolic_star4()).unwrap();
    let expected = series("associator4_symbolic.txt");
    for k in 0..=4 {
        assert_eq!(canonical(a.get(k)), canonical(expected.get(k)), "h^{k}");
    }
    assert_eq!(canonical(a.get(4)).len(), 765);
}

fn solved_star() -> GraphSeries {
    let relations = read_substitutions(&fixture("weights4_in_masters.txt"), "weights4").unwrap();
    series("star_product4_symbolic.txt").substitute_relations(&relations)
}

#[test]
fn leibniz_solution_reproduces_one_weight_component() {
    let a = associator(&solved_star()).unwrap();
    let part = a.extract_coefficient(&"w_4_100".parse().unwrap());

    let mut acc = Accumulator::new();
    for line in fixture("leibniz_w_4_100.txt").lines() {
        let (encoding, binding) = line.rsplit_once(' ').unwrap();
        let (_, value) = binding.split_once("==").unwrap();
        let c = parse_coeff(value).unwrap();
        let lg = LeibnizGraph::new(decode(encoding).unwrap(), 1).unwrap();
        for (c2, g) in lg.expand().terms() {
            acc.add(&c.try_mul(c2).unwrap(), g);
        }
    }
    let expansion = acc.finish();
    assert_eq!(canonical(part.get(4)).len(), 66);
    assert_eq!(canonical(&expansion), canonical(part.get(4)));
}

#[test]
fn gauge_removes_four_master_weights() {
    let star = solved_star();
    let gauged = gauge_transform(&star, &series("gauge_masters4.txt")).unwrap().reduce_mod_skew().unwrap();
    let text = write_series(&gauged, false);
    for i in [101, 102, 119, 125] {
        let name = format!("w_4_{i}");
        assert!(write_series(&star, false).contains(&name));
        assert!(!text.contains(&name), "{name} survives the gauge");
    }
    assert_eq!(canonical(gauged.get(3)), canonical(&star.get(3).reduce_mod_skew().unwrap()));
    assert!(text.contains("w_4_100") && text.contains("w_4_103"));
}

/// Series text in the exchange format with random small graphs and
/// coefficients.
fn series_text() -> impl Strategy<Value = String> {
    let term = (1usize..=3, prop::collection::vec(0u8..5, 6), -9i64..=9, 1i64..=6, prop::option::of(0u8..3)).prop_map(|(k, t, n, d, sym)| {
        let targets: Vec<String> = (0..k)
            .flat_map(|j| {
                let pick = |x: u8| {
                    let x = x as usize % (k + 1);
                    // skip the vertex itself
                    if x >= j + 2 { x + 1 } else { x }
                };
                [pick(t[2 * j]), pick(t[2 * j + 1])]
            })
            .map(|x| x.to_string())
            .collect();
        let coeff = match sym {
            Some(s) => format!("{n}/{d} + 3*w_{s}_1"),
            None => format!("{n}/{d}"),
        };
        (k, format!("2 {k} 1 {} {coeff}", targets.join(" ")))
    });
    prop::collection::vec(term, 0..8).prop_map(|terms| {
        let mut out = String::from("h^0:\n2 0 1 1\n");
        for k in 1..=3 {
            out.push_str(&format!("h^{k}:\n"));
            for (kk, line) in &terms {
                if *kk == k {
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_format_round_trips(text in series_text()) {
        let s = read_series(&text, "generated").unwrap();
        let once = write_series(&s, false);
        let again = read_series(&once, "written").unwrap();
        prop_assert_eq!(write_series(&again, false), once.clone());
        let grouped = write_series(&s.reduce_mod_skew().unwrap(), true);
        let regrouped = read_series(&grouped, "grouped").unwrap();
        prop_assert_eq!(write_series(&regrouped, true), grouped);
    }
}
