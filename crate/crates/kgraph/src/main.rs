use std::process::ExitCode;

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "KGRAPH_THREADS";

fn main() -> ExitCode {
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not set {THREADS_VAR}: {e}");
        }
    }
    let status = kgraph::cli::main_with_args(std::env::args().collect());
    ExitCode::from(status as u8)
}
