//! Text formats: graph series, relation files and substitution files.

use std::collections::BTreeMap;
use std::fmt::Write;

use kgraph_core::coeffs::{parse_binding, parse_coeff, parse_relation, CoeffExpr, Symbol};
use kgraph_core::graph::{decode, encoding_len, KontsevichGraph};
use kgraph_core::series::{group_by_differential_order, GraphSeries, GraphSum};

use crate::Error;

fn parse_err(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: source.to_string(),
        line,
        message: message.into(),
    }
}

/// Splits `m n s targets... coefficient` into the graph and the coefficient
/// text. The coefficient may itself contain spaces.
fn split_term(text: &str) -> Result<(KontsevichGraph, &str), String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() < 2 {
        return Err("expected a graph encoding".into());
    }
    let n: usize = tokens[1].parse().map_err(|_| format!("bad vertex count {:?}", tokens[1]))?;
    let want = encoding_len(n);
    if tokens.len() < want {
        return Err(format!("graph encoding needs {want} integers"));
    }
    // byte offset just past the last encoding token
    let last = tokens[want - 1];
    let end = last.as_ptr() as usize - text.as_ptr() as usize + last.len();
    let graph = decode(&text[..end]).map_err(|e| e.to_string())?;
    Ok((graph, text[end..].trim()))
}

/// Reads the series format: `h^k:` headers and `<encoding> <coefficient>`
/// lines. Blank lines and `#` comments are skipped; terms before the first
/// header belong to power 0. The precision is the highest power mentioned.
pub fn read_series(text: &str, source: &str) -> Result<GraphSeries, Error> {
    let mut powers: BTreeMap<u32, GraphSum> = BTreeMap::new();
    let mut current = 0u32;
    let mut seen_anything = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("h^") {
            let k = rest
                .strip_suffix(':')
                .and_then(|k| k.trim().parse::<u32>().ok())
                .ok_or_else(|| parse_err(source, lineno, format!("bad power header {line:?}")))?;
            current = k;
            powers.entry(k).or_default();
            seen_anything = true;
            continue;
        }
        let (graph, coeff) = split_term(line).map_err(|m| parse_err(source, lineno, m))?;
        if coeff.is_empty() {
            return Err(parse_err(source, lineno, "missing coefficient"));
        }
        let c = parse_coeff(coeff).map_err(|e| parse_err(source, lineno, e.to_string()))?;
        powers.entry(current).or_default().push(c, graph);
        seen_anything = true;
    }
    if !seen_anything {
        return Err(parse_err(source, 0, "no power header or term; the precision is undefined"));
    }
    let precision = powers.keys().next_back().copied().unwrap_or(0);
    let mut s = GraphSeries::new(precision);
    for (k, sum) in powers {
        s.set(k, sum);
    }
    Ok(s)
}

/// Writes a series with one `h^k:` header per power up to the precision,
/// optionally preceding each group of equal sink in-degrees by `# i j ...`.
pub fn write_series(s: &GraphSeries, differential_orders: bool) -> String {
    let mut out = String::new();
    for k in 0..=s.precision() {
        let _ = writeln!(out, "h^{k}:");
        write_sum(&mut out, s.get(k), differential_orders);
    }
    out
}

/// Appends the term lines of one sum.
pub fn write_sum(out: &mut String, sum: &GraphSum, differential_orders: bool) {
    if differential_orders {
        for (orders, terms) in group_by_differential_order(sum) {
            let orders: Vec<String> = orders.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "# {}", orders.join(" "));
            for (c, g) in terms {
                let _ = writeln!(out, "{g} {c}");
            }
        }
    } else {
        for (c, g) in sum.terms() {
            let _ = writeln!(out, "{g} {c}");
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Reads relations, one `LHS==RHS` per line, as expressions `LHS - RHS`.
pub fn read_relations(text: &str, source: &str) -> Result<Vec<CoeffExpr>, Error> {
    content_lines(text)
        .map(|(n, l)| parse_relation(l).map_err(|e| parse_err(source, n, e.to_string())))
        .collect()
}

/// Reads a substitution file of `NAME==EXPR` lines.
pub fn read_substitutions(text: &str, source: &str) -> Result<BTreeMap<Symbol, CoeffExpr>, Error> {
    let mut out = BTreeMap::new();
    for (n, l) in content_lines(text) {
        let (name, value) = parse_binding(l).map_err(|e| parse_err(source, n, e.to_string()))?;
        if out.insert(name.clone(), value).is_some() {
            return Err(parse_err(source, n, format!("{name} is bound twice")));
        }
    }
    Ok(out)
}

/// One `EXPR==0` line per relation.
pub fn write_relations(relations: &[CoeffExpr]) -> String {
    relations.iter().map(|r| format!("{r}==0\n")).collect()
}

/// One `NAME==EXPR` line per binding.
pub fn write_substitutions(bindings: &BTreeMap<Symbol, CoeffExpr>) -> String {
    bindings.iter().map(|(k, v)| format!("{k}=={v}\n")).collect()
}
