use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdcav::presets::{preset, NAMES};
use qdcav::{run_oracle, run_scenario, validate, AppError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "qdcav", version, about = "Polaron spectra of a quantum dot in a microcavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the spectra of a scenario file.
    Run {
        config: PathBuf,
        /// Overrides `paths.output`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, short)]
        quiet: bool,
    },
    /// Run a compiled-in scenario, or print it with --dump-config.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(NAMES))]
        name: String,
        #[arg(long)]
        dump_config: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, short)]
        quiet: bool,
    },
    /// Print derived scalars and validity diagnostics.
    Validate { config: PathBuf },
    /// Cross-check the spectra against the independent solvers.
    Oracle { config: PathBuf },
}

fn run(cfg: &ScenarioConfig, out: Option<PathBuf>, quiet: bool) -> Result<(), AppError> {
    let dir = out.unwrap_or_else(|| cfg.paths.output.clone());
    let outcome = run_scenario(cfg, &dir, quiet)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for c in &outcome.checks {
        println!("{}", c.line());
    }
    if !outcome.checks_passed() {
        return Err(AppError::OracleMismatch(format!("see {}", dir.join("manifest.json").display())));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Run { config, out, quiet } => run(&ScenarioConfig::load(&config)?, out, quiet),
        Command::Preset { name, dump_config, out, quiet } => {
            let cfg = preset(&name)?;
            if dump_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            run(&cfg, out, quiet)
        }
        Command::Validate { config } => {
            for line in validate(&ScenarioConfig::load(&config)?)? {
                println!("{line}");
            }
            Ok(())
        }
        Command::Oracle { config } => {
            let found = run_oracle(&ScenarioConfig::load(&config)?)?;
            for (t, c) in &found {
                println!("T = {t}: {}", c.line());
            }
            match found.iter().filter(|(_, c)| !c.passed).count() {
                0 => Ok(()),
                n => Err(AppError::OracleMismatch(format!("{n} of {} checks outside tolerance", found.len()))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
