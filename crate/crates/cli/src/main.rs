use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod gen;
mod problem;
mod report;
mod run;

/// Negative-squares certificates and indefinite interpolation solvers.
#[derive(Debug, Parser)]
#[command(name = "kappa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Relative zero tolerance for eigenvalues [default: 1e-9].
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Circle grid size N [default: 4096].
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Coefficient truncation J [default: 256].
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Seed for the zero search (run) or the instance (gen).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ask for a solution pair (run) or embed the request in the problem (gen).
    #[arg(long, global = true)]
    solve: bool,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify (and optionally solve) the problem in a JSON file; `-` reads stdin.
    Run { path: PathBuf },
    /// Write a seeded problem to `path` and its ground truth next to it.
    Gen {
        path: PathBuf,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(gen::KINDS))]
        kind: String,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u64).range(0..=3))]
        kappa: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..=64))]
        size: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("kappa: {msg}");
    ExitCode::from(1)
}

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn read_input(path: &Path) -> io::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        fs::read(path)
    }
}

/// `problem.json` → `problem.truth.json`.
fn truth_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "problem".into());
    path.with_file_name(format!("{stem}.truth.json"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Run { path } => {
            let raw = match read_input(path) {
                Ok(r) => r,
                Err(e) => return fail(&format!("{}: {e}", path.display())),
            };
            let Ok(text) = std::str::from_utf8(&raw) else { return fail("input is not UTF-8") };
            let problem = match problem::parse(text) {
                Ok(p) => p,
                Err(e) => return fail(&format!("{}: {e}", path.display())),
            };
            let ov = run::Overrides { tol: cli.tol, grid: cli.grid, trunc: cli.trunc, seed: cli.seed, solve: cli.solve };
            let report = match run::run(&problem, &raw, &ov) {
                Ok(r) => r,
                Err(run::InputError(e)) => return fail(&e),
            };
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            if let Err(e) = emit(cli.out.as_deref(), &text) {
                return fail(&e.to_string());
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Command::Gen { path, kind, kappa, size } => {
            let seed = cli.seed.unwrap_or(0);
            let (problem, truth) = match gen::generate(seed, kind, *kappa as usize, *size as usize, cli.solve) {
                Ok(x) => x,
                Err(e) => return fail(&e),
            };
            let mut p = serde_json::to_string_pretty(&problem).expect("problem serializes");
            p.push('\n');
            let mut t = serde_json::to_string_pretty(&truth).expect("truth serializes");
            t.push('\n');
            if let Err(e) = fs::write(path, p).and_then(|_| fs::write(truth_path(path), t)) {
                return fail(&format!("{}: {e}", path.display()));
            }
            ExitCode::SUCCESS
        }
    }
}
