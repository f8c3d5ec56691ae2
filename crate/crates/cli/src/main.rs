use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isospec::Execution;
use isospec_cli::app::{self, write_artifacts};
use isospec_cli::{parse_config, preset, AppError, Format, Outcome, RunConfig};

#[derive(Parser)]
#[command(
    name = "isospec",
    version,
    about = "Strictly isospectral potential families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in base problems
    Catalog {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_format)]
        format: Option<Format>,
    },
    /// Potentials and zero modes for one parameter tuple or a sweep
    Family(RunArgs),
    /// Zero mode at fixed x over a two-parameter mesh
    Sweep2d(RunArgs),
    /// Compare low-lying spectra of deformed and base potentials
    Verify(RunArgs),
    /// Pursey and Abraham-Moses endpoint potentials
    Limits(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration: fig1 .. fig5
    #[arg(long)]
    preset: Option<String>,
    /// Output path (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn load(args: &RunArgs) -> Result<RunConfig, AppError> {
    let text = match (&args.config, &args.preset) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|source| AppError::Io {
            path: path.clone(),
            source,
        })?,
        (None, Some(name)) => preset(name)
            .ok_or_else(|| AppError::Validation {
                field: "preset".into(),
                reason: format!("unknown preset {name:?} (expected fig1..fig5)"),
            })?
            .to_string(),
        (None, None) => unreachable!("clap requires --config or --preset"),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.format = format;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Outcome, AppError> {
    let exec = Execution::default();
    match cli.command {
        Command::Catalog { out, format } => {
            Ok(vec![app::catalog(format.unwrap_or_default(), out)].into())
        }
        Command::Family(a) => app::run_family(&load(&a)?, exec),
        Command::Sweep2d(a) => app::run_sweep2d(&load(&a)?, exec),
        Command::Verify(a) => app::run_verify(&load(&a)?),
        Command::Limits(a) => app::run_limits(&load(&a)?),
    }
}

fn main() -> ExitCode {
    // usage errors are validation errors (exit 1), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = run(cli).and_then(|outcome| {
        write_artifacts(&outcome.artifacts)?;
        match outcome.failure {
            Some(msg) => Err(AppError::Verification(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("isospec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
