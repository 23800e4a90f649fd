use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use revlab::runner::{self, Level};
use revlab::Error;

#[derive(Parser)]
#[command(name = "revlab", version, about = "Local reversibility laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment manifest.
    Run {
        config: PathBuf,
        /// Resolve a relative output dir against this directory instead of
        /// the current one.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Run the built-in check suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        /// Drop the depth term from E_c; the reverse-operator checks should
        /// then report failures.
        #[arg(long)]
        mutate_ec: bool,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Model utilities.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Ground energy, gap and degeneracy of a model config.
    Spectrum { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("REVLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("REVLAB_THREADS='{v}' is not a positive integer")))?;
        if n == 0 {
            return Err(Error::Config("REVLAB_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    let result = match cli.command {
        Command::Run { config, base } => read(&config)
            .and_then(|t| runner::parse_manifest(&t))
            .and_then(|m| runner::run(&m, base.as_deref().unwrap_or(Path::new("."))))
            .map(|w| {
                println!("{}", w.csv.display());
                println!("{}", w.echo.display());
                true
            }),
        Command::Verify { level, mutate_ec, json } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = runner::verify_suite(level, mutate_ec);
            if json {
                match serde_json::to_string_pretty(&report) {
                    Ok(s) => println!("{s}"),
                    Err(e) => eprintln!("error: {e}"),
                }
            } else {
                for c in &report.checks {
                    println!(
                        "[{}] C{:<2} {:<55} margin {:>11.3e}  {}",
                        if c.pass { "pass" } else { "FAIL" },
                        c.criterion,
                        c.name,
                        c.margin,
                        c.detail
                    );
                }
                let failed = report.failures();
                println!(
                    "{} checks, {} failed, {:.1} s",
                    report.checks.len(),
                    failed.len(),
                    report.elapsed_seconds
                );
                for c in failed {
                    println!("broken: C{} {}", c.criterion, c.name);
                }
            }
            Ok(report.passed())
        }
        Command::Model {
            command: ModelCommand::Spectrum { config },
        } => read(&config)
            .and_then(|t| runner::parse_model(&t))
            .and_then(|m| m.build())
            .and_then(|s| runner::model_spectrum(&s))
            .and_then(|v| Ok(serde_json::to_string_pretty(&v)?))
            .map(|s| {
                println!("{s}");
                true
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
