//! Acceptance criteria 1 to 10. Each check prints one PASS or FAIL line.
//! Runs without the test harness so the lines are always shown. The run
//! fails if any check fails other than those listed in
//! `KNOWN_UNATTAINABLE`, whose reasons are printed alongside.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use kgraph::io::{read_series, read_substitutions, write_series};
use kgraph::parallel;
use kgraph_core::coeffs::{parse_coeff, CoeffExpr, Rational, Symbol};
use kgraph_core::graph::{decode, generate, GenerateOptions, KontsevichGraph};
use kgraph_core::leibniz::{reduce_mod_jacobi, LeibnizGraph, Reduction};
use kgraph_core::linsolve::{verify_solution, LinearSystem, Solution};
use kgraph_core::poisson::{catalog, evaluate, jacobiator, Evaluator};
use kgraph_core::series::{GraphSeries, GraphSum};
use kgraph_core::star::{associator, build_star_product, cyclic_weight_relations, gauge_inverse, gauge_transform, BasicWeightTable, MissingWeight};
use kgraph_core::weightnum::is_integrand_zero;
use rand::{Rng, SeedableRng};

/// Wall-clock budgets.
const ENUMERATION_BUDGET: Duration = Duration::from_secs(60);
const STAR_BUDGET: Duration = Duration::from_secs(5);
const ASSOCIATOR_BUDGET: Duration = Duration::from_secs(30);
const ORDER3_BUDGET: Duration = Duration::from_secs(600);
const CYCLIC4_BUDGET: Duration = Duration::from_secs(900);
const MONTE_CARLO_BUDGET: Duration = Duration::from_secs(5);

/// Monte Carlo: samples, seed and the allowed distance in standard errors.
const MC_SAMPLES: u64 = 100_000;
const MC_SEED: u64 = 2024;
const MC_SIGMAS: f64 = 3.0;

/// Random rational trials per graph for zero-integrand detection.
const ZERO_TRIALS: usize = 20;

/// Checks that cannot pass with a correct implementation, with the reason.
const KNOWN_UNATTAINABLE: &[(&str, &str)] = &[
    (
        "6a",
        "after the cyclic relations, the relations coming from h^<=3 and from the seven listed h^4 \
         differential orders leave w_3_7, w_3_12, w_3_13, w_3_14 undetermined; \
         check 6b shows that the remaining h^4 orders do pin them",
    ),
    (
        "7a",
        "the quoted relation -1/1728 - 1/2*w_4_1 gives w_4_1 = -1/864, contradicting the tabulated \
         w_4_1 = -1/144; the generated relation 1/72 + 2*w_4_1, which agrees with the table, rescales to \
         -1/288 - 1/2*w_4_1, so the quoted constant is a misprint",
    ),
];

struct Report {
    lines: Vec<(String, bool, String)>,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: impl Into<String>) {
        let detail = detail.into();
        println!("criterion {id}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
        self.lines.push((id.to_string(), pass, detail));
    }

    fn timed(&mut self, id: &str, elapsed: Duration, budget: Duration) {
        self.check(id, elapsed <= budget, format!("{:.2?} of {:.0?} budget", elapsed, budget));
    }
}

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn fixture_series(name: &str) -> GraphSeries {
    read_series(&fixture(name), name).unwrap()
}

/// Canonical comparable form of a sum: sorted `graph coefficient` lines.
fn canonical(s: &GraphSum) -> Vec<String> {
    let mut v: Vec<String> = s.reduce_mod_skew().unwrap().terms().iter().map(|(c, g)| format!("{g} {c}")).collect();
    v.sort();
    v
}

/// Tabulated basic-graph weights up to order `k`.
fn known_weights(k: u32) -> BasicWeightTable {
    let mut s = fixture_series("basic_weights.txt");
    s.truncate(k);
    BasicWeightTable::from_series(&s).unwrap()
}

fn c1_enumeration(r: &mut Report) {
    let start = Instant::now();
    let all: Vec<usize> = (2..=4).map(|n| generate(n, 2, &GenerateOptions::default()).len()).collect();
    r.check("1a", all == [36, 1728, 160000], format!("|G_2,n| for n=2..4: {all:?}"));
    let basic: Vec<Vec<KontsevichGraph>> = (1..=4).map(|n| generate(n, 2, &GenerateOptions::basic())).collect();
    let sizes: Vec<usize> = basic.iter().map(Vec::len).collect();
    let nonzero: Vec<usize> = basic.iter().map(|b| b.iter().filter(|g| !g.is_zero()).count()).collect();
    r.check("1b", sizes == [1, 2, 15, 156], format!("basic sets {sizes:?}"));
    r.check("1c", nonzero == [1, 2, 14, 149], format!("nonzero basic {nonzero:?}"));
    r.timed("1d", start.elapsed(), ENUMERATION_BUDGET);
}

fn c2_normal_forms(r: &mut Report) {
    let mut forms = Vec::new();
    let mut signs_ok = true;
    for line in fixture("example_encodings.txt").lines() {
        let (targets, sign) = line.rsplit_once(' ').unwrap();
        let nf = decode(&format!("2 2 1 {targets}")).unwrap().normal_form();
        signs_ok &= i64::from(nf.sign()) == sign.parse::<i64>().unwrap();
        forms.push(nf.with_sign(1));
    }
    let one_form = forms.windows(2).all(|w| w[0] == w[1]);
    r.check("2a", one_form && signs_ok && forms.len() == 8, format!("8 encodings share {} with the listed signs", forms[0]));
    let zero = decode("2 3 1 0 1 0 1 2 3").unwrap().normal_form();
    r.check("2b", zero.sign() == 0, format!("2 3 1 0 1 0 1 2 3 has normal-form sign {}", zero.sign()));
}

fn c3_star(r: &mut Report) -> GraphSeries {
    let start = Instant::now();
    let star = build_star_product(&known_weights(3), 3, MissingWeight::Zero).unwrap();
    let elapsed = start.elapsed();
    let expected = fixture_series("star_product4_symbolic.txt");
    let same: Vec<bool> = (0..=3).map(|k| canonical(star.get(k)) == canonical(expected.get(k))).collect();
    r.check("3a", same.iter().all(|&b| b), format!("h^0..h^3 agree per power: {same:?}"));
    r.timed("3b", elapsed, STAR_BUDGET);
    star
}

fn c4_associator(r: &mut Report, star3: &GraphSeries) {
    let start = Instant::now();
    let a = associator(star3).unwrap();
    let elapsed = start.elapsed();
    let expected = fixture_series("associator4_symbolic.txt");
    r.check("4a", a.get(1).reduce_mod_skew().unwrap().is_empty(), "h^1 block empty");
    let h2 = canonical(a.get(2));
    r.check("4b", h2 == canonical(expected.get(2)), format!("h^2 block: {h2:?}"));
    r.check("4c", canonical(a.get(3)) == canonical(expected.get(3)), format!("h^3 block, {} terms", a.get(3).len()));
    r.timed("4d", elapsed, ASSOCIATOR_BUDGET);
}

fn c5_poisson(r: &mut Report) {
    let mut s = GraphSeries::new(0);
    s.set(0, jacobiator());
    let polar = evaluate(&s, &catalog("2d-polar").unwrap()).unwrap();
    r.check("5a", polar[&0].is_zero(), "Jacobiator at 2d-polar is the zero operator");
    let generic = catalog("3d-generic").unwrap();
    let mut ev = Evaluator::new(&generic);
    let op = ev.sum(&jacobiator()).unwrap();
    r.check("5b", op.is_zero(), "Jacobiator at 3d-generic is the zero differential polynomial");
}

/// The order-3 values of the worked example.
fn order3_expected() -> BTreeMap<String, Rational> {
    (1..=14)
        .map(|i| {
            let v = match i {
                1 => Rational::new(1, 24),
                4 | 5 | 11 | 12 => Rational::new(-1, 48),
                _ => Rational::ZERO,
            };
            (format!("w_3_{i}"), v)
        })
        .collect()
}

/// Whether `sol` pins every order-3 weight to its expected value; also
/// returns the order-3 names left free.
fn pins_order3(sol: &Solution) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut free = Vec::new();
    for (name, value) in order3_expected() {
        match sol.solved.get(&Symbol::from(name.as_str())) {
            Some(e) if e.as_constant() == Some(&value) => {}
            Some(e) if e.is_constant() => ok = false,
            _ => {
                ok = false;
                free.push(name);
            }
        }
    }
    (ok, free)
}

fn c6_order3(r: &mut Report) {
    let start = Instant::now();
    let mut table = known_weights(2);
    table.insert_symbolic(3);
    table.insert_symbolic(4);
    let star = build_star_product(&table, 4, MissingWeight::Error).unwrap();
    let mut star3 = star.clone();
    star3.truncate(3);
    let cyclic = cyclic_weight_relations(&star3).unwrap();
    let assoc = associator(&star).unwrap();
    let p = catalog("3d-generic").unwrap();
    let listed: [[usize; 3]; 7] = [[1, 3, 2], [2, 3, 1], [2, 1, 3], [3, 2, 1], [3, 1, 2], [1, 2, 3], [2, 2, 2]];

    let selected = parallel::make_vanish(&assoc, &p, |k, d| k <= 3 || listed.iter().any(|o| o.as_slice() == d)).unwrap();
    let sol = LinearSystem::new(cyclic.iter().cloned().chain(selected).collect()).solve().unwrap();
    let (ok, free) = pins_order3(&sol);
    r.check("6a", ok, format!("cyclic + h^<=3 + listed h^4 orders; order-3 weights left free: {free:?}"));

    let full = parallel::make_vanish(&assoc, &p, |_, _| true).unwrap();
    let count = full.len();
    let sol = LinearSystem::new(cyclic.iter().cloned().chain(full).collect()).solve().unwrap();
    let (ok, free) = pins_order3(&sol);
    r.check("6b", ok, format!("cyclic + every h^<=4 order ({count} relations); free: {free:?}"));
    r.timed("6c", start.elapsed(), ORDER3_BUDGET);
}

/// Whether some relation equals `expected` up to a nonzero rational factor.
fn contains_scaled(relations: &[CoeffExpr], expected: &str) -> bool {
    let want = parse_coeff(expected).unwrap().monic();
    relations.iter().any(|r| r.monic() == want)
}

fn c7_cyclic4(r: &mut Report) {
    let start = Instant::now();
    let mut table = known_weights(3);
    table.insert_symbolic(4);
    let star = build_star_product(&table, 4, MissingWeight::Zero).unwrap();
    let relations = cyclic_weight_relations(&star).unwrap();
    let quoted = "-1/1728 - 1/2*w_4_1";
    r.check("7a", contains_scaled(&relations, quoted), format!("{quoted}==0 among {} relations", relations.len()));
    let others = ["-1/384+1/8*w_4_6-1/4*w_4_8", "-1/3456-1/12*w_4_2"];
    let found: Vec<bool> = others.iter().map(|e| contains_scaled(&relations, e)).collect();
    r.check("7b", found.iter().all(|&b| b), format!("{others:?} present: {found:?}"));

    let masters = read_substitutions(&fixture("master_weights4.txt"), "masters4").unwrap();
    let mut bindings: BTreeMap<Symbol, CoeffExpr> = read_substitutions(&fixture("weights4_in_masters.txt"), "weights4")
        .unwrap()
        .into_iter()
        .map(|(k, v)| (k, v.substitute_map(&masters)))
        .collect();
    bindings.extend(masters);
    r.check("7c", verify_solution(&relations, &bindings), format!("tabulated weights satisfy all {} relations", relations.len()));
    r.timed("7d", start.elapsed(), CYCLIC4_BUDGET);
}

fn c8_gauge(r: &mut Report) {
    let star = fixture_series("star_product2.txt");
    let t = fixture_series("gaugeloop.txt");
    let gauged = gauge_transform(&star, &t).unwrap().reduce_mod_skew().unwrap();
    let text = write_series(&gauged, false);
    r.check("8a", text == fixture("star_product2_gauged.txt"), "gauged order-2 star matches byte for byte");
    let back = gauge_transform(&gauged, &gauge_inverse(&t).unwrap()).unwrap().reduce_mod_skew().unwrap();
    r.check("8b", back == star.reduce_mod_skew().unwrap(), "inverse gauge restores the star product");
}

fn c9_leibniz(r: &mut Report, star3: &GraphSeries) {
    let mut star2 = star3.clone();
    star2.truncate(2);
    let mut h2 = associator(&star2).unwrap();
    h2.set(0, GraphSum::new());
    h2.set(1, GraphSum::new());
    let reductions = reduce_mod_jacobi(&h2, 1, usize::MAX, false).unwrap();
    let factor = match reductions.get(&2) {
        Some(Reduction::Factorized(f)) if f.terms.len() == 1 => format!("{} {}", f.terms[0].1, f.terms[0].2),
        other => format!("{other:?}"),
    };
    r.check("9a", factor == "3 2 1 0 1 3 2 2/3", format!("h^2 associator = {factor} x Jacobiator"));

    let example = LeibnizGraph::new(decode("3 5 1 0 5 3 6 3 4 3 1 6 2").unwrap(), 1).unwrap();
    let terms: Vec<String> = example.expand_terms().iter().map(|g| g.to_string()).collect();
    let expected: Vec<String> = fixture("leibniz_example_expansion.txt").lines().map(|l| decode(l).unwrap().to_string()).collect();
    r.check("9b", terms == expected, "example Leibniz graph expands to the six listed graphs");

    let p = catalog("3d-generic").unwrap();
    let mut ev = Evaluator::new(&p);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut zero = 0;
    for _ in 0..50 {
        let l = rng.random_range(1..=2);
        let n = rng.random_range(2 * l..=4);
        let lg = LeibnizGraph::random(3, n, l, &mut rng);
        if ev.sum(&lg.expand()).unwrap().is_zero() {
            zero += 1;
        }
    }
    r.check("9c", zero == 50, format!("{zero} of 50 random Leibniz graphs vanish at 3d-generic"));
}

fn c10_weights(r: &mut Report) {
    let start = Instant::now();
    let (est, se) = parallel::monte_carlo_weight(&decode("2 1 1 0 1").unwrap(), MC_SAMPLES, MC_SEED).unwrap();
    let elapsed = start.elapsed();
    r.check("10a", (est - 0.5).abs() <= MC_SIGMAS * se, format!("wedge weight {est:.5} +/- {se:.5}"));
    r.timed("10b", elapsed, MONTE_CARLO_BUDGET);
    let basic: Vec<KontsevichGraph> = generate(4, 2, &GenerateOptions::basic()).into_iter().filter(|g| !g.is_zero()).collect();
    let zero = basic.iter().filter(|g| is_integrand_zero(g, ZERO_TRIALS, 1).unwrap()).count();
    r.check("10c", zero == 21 && basic.len() == 149, format!("{zero} of {} nonzero basic graphs at k=4 have zero integrand", basic.len()));
}

fn main() {
    let mut r = Report { lines: Vec::new() };
    c1_enumeration(&mut r);
    c2_normal_forms(&mut r);
    let star3 = c3_star(&mut r);
    c4_associator(&mut r, &star3);
    c5_poisson(&mut r);
    c6_order3(&mut r);
    c7_cyclic4(&mut r);
    c8_gauge(&mut r);
    c9_leibniz(&mut r, &star3);
    c10_weights(&mut r);

    let mut unexpected = Vec::new();
    for (id, pass, _) in &r.lines {
        if *pass {
            continue;
        }
        match KNOWN_UNATTAINABLE.iter().find(|(k, _)| k == id) {
            Some((_, why)) => println!("known unattainable {id}: {why}"),
            None => unexpected.push(id.clone()),
        }
    }
    let passed = r.lines.iter().filter(|l| l.1).count();
    println!("{passed} of {} checks pass", r.lines.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
