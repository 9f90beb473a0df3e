use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use selectorate_cli::{run, CliError, Command, Format, Outcome, Overrides, RegimeSelector, RunConfig};

#[derive(Parser)]
#[command(name = "selectorate", version, about = "Leader allocations under the selectorate model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one regime.
    Solve(Flags),
    /// Sweep one parameter across regimes.
    Sweep(Flags),
    /// Compare the solver with the brute-force grid oracle.
    Oracle(Flags),
    /// Reconcile solver and oracle output with the worked example's reference figures.
    Report(Flags),
}

#[derive(clap::Args)]
struct Flags {
    /// Parameter file (`key = value` lines or JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse::<Format>)]
    format: Option<Format>,
    /// Base path for sweep charts; writes `<stem>_public.svg` and `<stem>_private.svg`.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_parser = parse::<RegimeSelector>)]
    regime: Option<RegimeSelector>,
    /// Retention probability for the general regime.
    #[arg(long)]
    rho: Option<f64>,
    /// Decimal places in CSV and JSON output (2–15).
    #[arg(long)]
    precision: Option<usize>,
}

fn parse<T: std::str::FromStr<Err = CliError>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn execute(command: Command, flags: Flags) -> Result<Outcome, CliError> {
    let text =
        fs::read_to_string(&flags.config).map_err(|source| CliError::Io { path: flags.config.clone(), source })?;
    let mut config = RunConfig::parse(&text)?;
    config.apply(&Overrides {
        out: flags.out,
        format: flags.format,
        svg: flags.svg,
        regime: flags.regime,
        rho: flags.rho,
        precision: flags.precision,
    });
    run(command, &config)
}

fn write_all(outcome: &Outcome) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for emitted in &outcome.outputs {
        match &emitted.path {
            Some(path) => {
                fs::write(path, &emitted.contents).map_err(|source| CliError::Io { path: path.clone(), source })?
            }
            None => lock
                .write_all(emitted.contents.as_bytes())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?,
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Solve(f) => (Command::Solve, f),
        Cmd::Sweep(f) => (Command::Sweep, f),
        Cmd::Oracle(f) => (Command::Oracle, f),
        Cmd::Report(f) => (Command::Report, f),
    };
    let code = match execute(command, flags).and_then(|outcome| write_all(&outcome).map(|()| outcome)) {
        Ok(outcome) => {
            if let Some(message) = &outcome.message {
                eprintln!("selectorate: {message}");
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("selectorate: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
