use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use fck_core::archetypes::standard_registry;
use fck_core::exchange::SolverKind;
use fck_core::output::{OutputTables, TableKind};
use fck_core::scenario::{self, analysis, ScenarioError};

#[derive(Parser)]
#[command(name = "fck", version, about = "Agent-based nuclear fuel cycle simulator")]
struct Cli {
    /// Print progress information.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its output tables.
    Run {
        scenario: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Override the solver named in the scenario.
        #[arg(long, value_enum)]
        solver: Option<Solver>,
        /// Record every exchange arc and its flow.
        #[arg(long)]
        dump_exchange: bool,
    },
    /// Check a scenario without running it.
    Validate { scenario: PathBuf },
    /// Compute a time series from a finished run's tables.
    Metrics {
        dir: PathBuf,
        #[arg(long, default_value = "pu_inventory")]
        metric: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
    /// Print the recorded exchange graph of one month.
    DumpExchange {
        dir: PathBuf,
        #[arg(long)]
        step: u64,
    },
    /// Check the foreign keys of a finished run's tables.
    Audit { dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Greedy,
    Lp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

/// Failure with its exit status: 1 for bad input, 2 for internal errors.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn user(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure { code: if e.is_user_error() { 1 } else { 2 }, message: e.to_string() }
    }
}

fn load_tables(dir: &Path) -> Result<OutputTables, Failure> {
    if !dir.is_dir() {
        return Err(Failure::user(format!("{} is not a directory", dir.display())));
    }
    OutputTables::load_dir(dir).map_err(|e| Failure::user(format!("{}: {e}", dir.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |e: std::io::Error| Failure { code: 2, message: e.to_string() };
    match cli.command {
        Command::Run { scenario, output, solver, dump_exchange } => {
            let mut doc = scenario::load(&scenario)?;
            if let Some(s) = solver {
                doc.control.solver = match s {
                    Solver::Greedy => SolverKind::Greedy,
                    Solver::Lp => SolverKind::Lp,
                };
            }
            doc.control.dump_exchange |= dump_exchange;
            std::fs::create_dir_all(&output)
                .map_err(|e| Failure::user(format!("{}: {e}", output.display())))?;
            let started = Instant::now();
            let (tables, summary) = doc.run(standard_registry(), Some(output.clone()))?;
            log::info!(
                "{} months in {:.2?}, {} trades",
                doc.control.duration,
                started.elapsed(),
                summary.trades
            );
            let diagnostics = tables.table(TableKind::Diagnostics).len();
            if diagnostics > 0 {
                log::warn!("{diagnostics} diagnostics recorded");
            }
            writeln!(out, "wrote {}", output.display()).map_err(io)?;
        }
        Command::Validate { scenario } => {
            let doc = scenario::load(&scenario)?;
            let errs = doc.validate(&standard_registry());
            if !errs.is_empty() {
                return Err(ScenarioError::Invalid(errs).into());
            }
            // A trial build catches archetype-level problems too.
            let table = fck_core::NuclideTable::from_env()
                .map_err(|e| Failure::user(e.to_string()))?;
            doc.build_engine(standard_registry(), std::sync::Arc::new(table), None)?;
            writeln!(out, "{}: ok", scenario.display()).map_err(io)?;
        }
        Command::Metrics { dir, metric, out: Format::Csv } => {
            let tables = load_tables(&dir)?;
            let series = analysis::metric(&tables, &metric).ok_or_else(|| {
                Failure::user(format!(
                    "unknown metric '{metric}'; available: {}",
                    analysis::METRICS.join(", ")
                ))
            })?;
            writeln!(out, "month,{}", if metric == "pu_inventory" { "kg" } else { "value" })
                .map_err(io)?;
            for (t, v) in series {
                writeln!(out, "{t},{v}").map_err(io)?;
            }
        }
        Command::DumpExchange { dir, step } => {
            let tables = load_tables(&dir)?;
            let t = tables.table(TableKind::ExchangeArcs);
            if t.is_empty() {
                return Err(Failure::user(
                    "no exchange arcs recorded; rerun with --dump-exchange",
                ));
            }
            writeln!(out, "{}", TableKind::ExchangeArcs.header().join(",")).map_err(io)?;
            let step = step.to_string();
            for r in t.rows.iter().filter(|r| r[0] == step) {
                writeln!(out, "{}", r.join(",")).map_err(io)?;
            }
        }
        Command::Audit { dir } => {
            let tables = load_tables(&dir)?;
            let problems = analysis::audit(&tables);
            for p in &problems {
                writeln!(out, "{p}").map_err(io)?;
            }
            if !problems.is_empty() {
                return Err(Failure::user(format!("{} integrity violations", problems.len())));
            }
            writeln!(out, "ok").map_err(io)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Bad arguments are user errors like any other.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
