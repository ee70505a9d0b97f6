//! The `kgraph` command line. Every subcommand can also be invoked through
//! a link named after it, e.g. `reduce_mod_skew file.txt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use kgraph_core::coeffs::{Symbol, Target};
use kgraph_core::graph::{decode, generate, GenerateOptions, KontsevichGraph};
use kgraph_core::leibniz::{reduce_mod_jacobi, Reduction};
use kgraph_core::linsolve::LinearSystem;
use kgraph_core::poisson::{catalog, evaluate};
use kgraph_core::series::GraphSeries;
use kgraph_core::star::{associator, build_star_product, cyclic_weight_relations, gauge_transform, BasicWeightTable, MissingWeight};
use kgraph_core::weightnum::integrand_text;

use crate::io::{read_relations, read_series, read_substitutions, write_relations, write_series, write_substitutions};
use crate::{dump, parallel, Error};

fn yes_no(s: &str) -> Result<bool, String> {
    match s {
        "yes" | "true" | "1" => Ok(true),
        "no" | "false" | "0" => Ok(false),
        _ => Err(format!("expected yes or no, got {s:?}")),
    }
}

/// Parses `i,j,k` into a list of differential orders.
fn orders(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|t| t.trim().parse().map_err(|_| format!("bad differential order {s:?}"))).collect()
}

#[derive(Parser, Debug)]
#[command(name = "kgraph", version, about = "Kontsevich graph calculus: graphs, star products, Poisson evaluation, weight relations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MissingPolicy {
    Error,
    Zero,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    #[command(name = "generate_graphs")]
    /// List Kontsevich graphs with n internal vertices on m sinks.
    GenerateGraphs {
        n: usize,
        #[arg(default_value_t = 2)]
        m: usize,
        #[arg(long, value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        normal_forms: bool,
        /// Number the nonzero graphs with indeterminates w_<n>_<i>.
        #[arg(long, value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        with_coefficients: bool,
        /// Prime, positive-order normal forms up to mirror images.
        #[arg(long, value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        basic: bool,
        #[arg(long, value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        prime: bool,
        #[arg(long, alias = "postive-differential-order", value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        positive_differential_order: bool,
        #[arg(long, value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        modulo_mirror_images: bool,
        #[arg(long, value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        tadpoles: bool,
        #[arg(long, value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        multiple_edges: bool,
        /// Drop graphs whose normal form vanishes.
        #[arg(long, value_parser = yes_no, default_value = "no", num_args = 0..=1, default_missing_value = "yes")]
        nonzero: bool,
        #[arg(long)]
        max_internal_indegree: Option<usize>,
    },
    #[command(name = "reduce_mod_skew")]
    /// Normal forms, merged coefficients, zero graphs dropped.
    ReduceModSkew {
        file: String,
        #[arg(long)]
        print_differential_orders: bool,
    },
    #[command(name = "skew_symmetrize")]
    /// Signed sum over all permutations of the sinks.
    SkewSymmetrize { file: String },
    #[command(name = "substitute_relations")]
    /// Replace indeterminates by the right-hand sides of NAME==EXPR lines.
    SubstituteRelations { file: String, substitutions: String },
    #[command(name = "extract_coefficient")]
    /// Coefficient of one indeterminate (or `1` for the constant part).
    ExtractCoefficient { file: String, target: String },
    #[command(name = "star_product")]
    /// Star product up to the precision of a basic-set file.
    StarProduct {
        file: String,
        /// Treat basic graphs missing from the file as having weight 0.
        #[arg(long, value_enum, default_value_t = MissingPolicy::Error)]
        missing_weights: MissingPolicy,
    },
    #[command(name = "star_product_associator")]
    /// (f*g)*h - f*(g*h) for a star product file.
    StarProductAssociator { file: String },
    #[command(name = "cyclic_weight_relations")]
    /// Cyclic weight relations of a star product, one EXPR==0 per line.
    CyclicWeightRelations { file: String },
    #[command(name = "gauge")]
    /// Gauge a star product by a one-sink series starting with the bare vertex.
    Gauge { star: String, transformation: String },
    #[command(name = "poisson_evaluate")]
    /// Evaluate a numeric series at a Poisson structure.
    PoissonEvaluate { file: String, structure: String },
    #[command(name = "poisson_make_vanish")]
    /// Linear relations making a symbolic series vanish at a Poisson structure.
    PoissonMakeVanish {
        file: String,
        structure: String,
        #[arg(long)]
        linear_solve: bool,
        /// Keep every differential order at powers up to this one...
        #[arg(long)]
        full_up_to: Option<u32>,
        /// ...and at higher powers only these orders, written i,j,k.
        #[arg(long = "order", value_parser = orders)]
        orders: Vec<Vec<usize>>,
    },
    #[command(name = "linsolve")]
    /// Solve a relation file, printing NAME==EXPR lines.
    Linsolve {
        file: String,
        /// Names to keep free whenever the rank allows, comma separated.
        #[arg(long, value_delimiter = ',')]
        prefer_free: Vec<String>,
    },
    #[command(name = "reduce_mod_jacobi")]
    /// Factor each power of a series through Leibniz graphs.
    ReduceModJacobi {
        file: String,
        #[arg(default_value_t = 1)]
        max_jacobiators: usize,
        #[arg(default_value_t = usize::MAX)]
        max_jac_indegree: usize,
        #[arg(long)]
        solve: bool,
    },
    #[command(name = "weight_integrands")]
    /// Weight integrands of a two-sink series as Det[...] expressions.
    WeightIntegrands { file: String },
    #[command(name = "zero_integrands")]
    /// Graphs of a series whose weight integrand vanishes identically.
    ZeroIntegrands {
        file: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    #[command(name = "monte_carlo_weight")]
    /// Monte Carlo estimate of the weight of one graph.
    MonteCarloWeight {
        /// Graph encoding, e.g. "2 1 1 0 1".
        graph: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Subcommand names usable as program names.
pub const COMMANDS: &[&str] = &[
    "generate_graphs",
    "reduce_mod_skew",
    "skew_symmetrize",
    "substitute_relations",
    "extract_coefficient",
    "star_product",
    "star_product_associator",
    "cyclic_weight_relations",
    "gauge",
    "poisson_evaluate",
    "poisson_make_vanish",
    "linsolve",
    "reduce_mod_jacobi",
    "weight_integrands",
    "zero_integrands",
    "monte_carlo_weight",
];

/// Inserts the subcommand when the program is invoked under one of its
/// names.
pub fn normalize_args(mut args: Vec<String>) -> Vec<String> {
    if let Some(first) = args.first() {
        let base = Path::new(first).file_stem().and_then(|s| s.to_str()).unwrap_or("");
        if COMMANDS.contains(&base) {
            let name = base.to_string();
            args.insert(1, name);
        }
    }
    args
}

/// Reads a file, or standard input for `-`.
pub fn read_input(path: &str) -> Result<String, Error> {
    let io_err = |source| Error::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io_err)
    }
}

fn series(path: &str) -> Result<GraphSeries, Error> {
    read_series(&read_input(path)?, path)
}

fn generate_lines(n: usize, m: usize, opts: &GenerateOptions, with_coefficients: bool) -> String {
    let mut out = String::new();
    let mut index = 0;
    for g in generate(n, m, opts) {
        if with_coefficients {
            if g.is_zero() {
                let _ = writeln!(out, "{g} 0");
            } else {
                index += 1;
                let _ = writeln!(out, "{g} w_{n}_{index}");
            }
        } else {
            let _ = writeln!(out, "{g}");
        }
    }
    out
}

/// Runs one parsed command and returns its standard output.
pub fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::GenerateGraphs {
            n,
            m,
            normal_forms,
            with_coefficients,
            basic,
            prime,
            positive_differential_order,
            modulo_mirror_images,
            tadpoles,
            multiple_edges,
            nonzero,
            max_internal_indegree,
        } => {
            let mut opts = if basic { GenerateOptions::basic() } else { GenerateOptions::default() };
            opts.normal_forms |= normal_forms;
            opts.prime |= prime;
            opts.positive_differential_order |= positive_differential_order;
            opts.modulo_mirror_images |= modulo_mirror_images;
            opts.allow_tadpoles = tadpoles;
            opts.allow_multiple_edges = multiple_edges;
            opts.include_zero = !nonzero;
            opts.max_internal_indegree = max_internal_indegree;
            if opts.modulo_mirror_images && m != 2 {
                return Err(Error::Usage("mirror images are defined for two sinks only".into()));
            }
            Ok(generate_lines(n, m, &opts, with_coefficients))
        }
        Command::ReduceModSkew { file, print_differential_orders } => {
            Ok(write_series(&series(&file)?.reduce_mod_skew()?, print_differential_orders))
        }
        Command::SkewSymmetrize { file } => Ok(write_series(&series(&file)?.skew_symmetrize()?, false)),
        Command::SubstituteRelations { file, substitutions } => {
            let s = series(&file)?;
            let subs = read_substitutions(&read_input(&substitutions)?, &substitutions)?;
            Ok(write_series(&s.substitute_relations(&subs), false))
        }
        Command::ExtractCoefficient { file, target } => {
            let t: Target = target.parse()?;
            Ok(write_series(&series(&file)?.extract_coefficient(&t), false))
        }
        Command::StarProduct { file, missing_weights } => {
            let s = series(&file)?;
            let table = BasicWeightTable::from_series(&s)?;
            let policy = match missing_weights {
                MissingPolicy::Error => MissingWeight::Error,
                MissingPolicy::Zero => MissingWeight::Zero,
            };
            Ok(write_series(&build_star_product(&table, s.precision(), policy)?, false))
        }
        Command::StarProductAssociator { file } => Ok(write_series(&associator(&series(&file)?)?, true)),
        Command::CyclicWeightRelations { file } => Ok(write_relations(&cyclic_weight_relations(&series(&file)?)?)),
        Command::Gauge { star, transformation } => {
            let s = series(&star)?;
            let t = series(&transformation)?;
            Ok(write_series(&gauge_transform(&s, &t)?, false))
        }
        Command::PoissonEvaluate { file, structure } => {
            let s = series(&file)?;
            let p = catalog(&structure)?;
            let ops = evaluate(&s, &p)?;
            dump::render_evaluation(&s, &p, &ops)
        }
        Command::PoissonMakeVanish {
            file,
            structure,
            linear_solve,
            full_up_to,
            orders,
        } => {
            let s = series(&file)?;
            let p = catalog(&structure)?;
            let relations = parallel::make_vanish(&s, &p, |k, d| match full_up_to {
                None => true,
                Some(limit) => k <= limit || orders.iter().any(|o| o.as_slice() == d),
            })?;
            if linear_solve {
                let sol = LinearSystem::new(relations).solve()?;
                Ok(write_substitutions(&sol.solved))
            } else {
                Ok(write_relations(&relations))
            }
        }
        Command::Linsolve { file, prefer_free } => {
            let rels = read_relations(&read_input(&file)?, &file)?;
            let sol = LinearSystem::new(rels)
                .with_preferred_free(prefer_free.into_iter().map(Symbol::from))
                .solve()?;
            Ok(write_substitutions(&sol.solved))
        }
        Command::ReduceModJacobi {
            file,
            max_jacobiators,
            max_jac_indegree,
            solve,
        } => {
            let s = series(&file)?;
            let reductions = reduce_mod_jacobi(&s, max_jacobiators, max_jac_indegree, solve)?;
            Ok(render_reductions(&reductions))
        }
        Command::WeightIntegrands { file } => {
            let s = series(&file)?;
            let mut out = String::new();
            for (_, sum) in s.powers() {
                for (c, g) in sum.terms() {
                    let _ = writeln!(out, "(* {g}    {c} *)");
                    let _ = writeln!(out, "{}", integrand_text(g)?);
                }
            }
            Ok(out)
        }
        Command::ZeroIntegrands { file, trials, seed } => {
            let s = series(&file)?;
            let graphs: Vec<KontsevichGraph> = s.powers().flat_map(|(_, sum)| sum.terms().iter().map(|(_, g)| g.clone())).collect();
            let flags = parallel::zero_integrands(&graphs, trials, seed)?;
            let mut out = String::new();
            for (g, zero) in graphs.iter().zip(flags) {
                if zero {
                    let _ = writeln!(out, "{g}");
                }
            }
            Ok(out)
        }
        Command::MonteCarloWeight { graph, samples, seed } => {
            let g = decode(&graph)?;
            let (est, se) = parallel::monte_carlo_weight(&g, samples, seed)?;
            Ok(format!("{g} {est:.8e} {se:.2e}\n"))
        }
    }
}

/// One `h^k:` block per power: Leibniz encodings with `NAME==VALUE`, forced
/// values of the series' own indeterminates, or the unfactorizable residual.
pub fn render_reductions(reductions: &BTreeMap<u32, Reduction>) -> String {
    let mut out = String::new();
    for (k, r) in reductions {
        let _ = writeln!(out, "h^{k}:");
        match r {
            Reduction::Factorized(f) => {
                for (name, lg, c) in &f.terms {
                    let _ = writeln!(out, "{lg} {name}=={c}");
                }
                for (name, v) in &f.unknowns {
                    let _ = writeln!(out, "{name}=={v}");
                }
            }
            Reduction::Residual(rest) => {
                out.push_str("# no factorization; residual:\n");
                for (c, g) in rest.terms() {
                    let _ = writeln!(out, "{g} {c}");
                }
            }
        }
    }
    out
}

/// Entry point shared by the binary and its aliases: parses, runs, and
/// reports errors on standard error. Returns the exit status.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(text) => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
