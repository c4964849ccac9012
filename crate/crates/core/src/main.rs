use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hslab::cli::{exit_code, run, Config, Subcommand};
use hslab::Error;

/// Spectral half-space Schrödinger solver and estimate experiments.
///
/// Each run is described by one sectioned `key = value` file. Reports are
/// written as JSON (`report_version` 1) to the output directory, together with
/// optional HSFIELD1 field files and CSV tables named in `[output]`.
///
/// Exit status: 0 success, 1 unreadable or invalid run file, 2 violated
/// precondition (for example incompatible data), 3 numerical-accuracy failure.
#[derive(Parser, Debug)]
#[command(name = "hslab", version)]
struct Cli {
    /// Experiment to run; must match `[run] subcommand` when that is set.
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Run file.
    config: PathBuf,
    /// Cap on worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (overrides HSLAB_OUTPUT_DIR and `[output] dir`).
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn fail(path: &std::path::Path, e: &Error) -> ExitCode {
    match e {
        Error::Parse { line, col, msg } if *line > 0 => eprintln!("{}:{line}:{col}: {msg}", path.display()),
        _ => eprintln!("{}: {e}", path.display()),
    }
    ExitCode::from(exit_code(e) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("cannot set the thread count: {e}");
            return ExitCode::from(1);
        }
    }
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail(&cli.config, &Error::Io(e)),
    };
    let cfg = match Config::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(&cli.config, &e),
    };
    let base = cli.config.parent().map(|p| p.to_path_buf()).unwrap_or_default();
    match run(Some(cli.subcommand), &cfg, &base, cli.output_dir.as_deref()) {
        Ok(out) => {
            if let Some(e) = &out.error {
                eprintln!("{}: {e}", cli.config.display());
            }
            println!("{}", out.artifacts.report.display());
            ExitCode::from(out.code as u8)
        }
        Err(e) => fail(&cli.config, &e),
    }
}
