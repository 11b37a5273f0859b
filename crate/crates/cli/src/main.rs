use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fockline_cli::output::write;
use fockline_cli::scenario::{scenario_from_value, Kind};
use fockline_cli::{render, run, run_sweep, CliError, Format, Result, SweepSpec};

/// Linear-optics, polarization-imaging and cavity-QED experiments driven by
/// JSON scenario files.
#[derive(Parser)]
#[command(name = "fockline", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Three-path single-photon interferometer with coherent reference beams.
    Twc(RunArgs),
    /// Two-slit polarization imaging with an absorbing wire.
    Afshar(RunArgs),
    /// Third-order effective coupling, perturbative and exact.
    Cqed(RunArgs),
    /// Arbitrary circuit of splitters, phase shifters and coherent sources.
    Custom(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write here instead of standard output. With `--format csv` and no
    /// `--table`, this is a directory receiving one file per table.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep one parameter, e.g. `theta2=0:pi:64`.
    #[arg(long)]
    sweep: Option<String>,
    /// Emit only the named table.
    #[arg(long)]
    table: Option<String>,
}

fn execute(kind: Kind, args: &RunArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|source| CliError::Read { path: args.scenario.clone(), source })?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Json(e.to_string()))?;
    let scenario = scenario_from_value(doc.clone())?;
    if scenario.kind() != kind {
        return Err(CliError::Schema(format!(
            "{} holds a `{}` scenario, not `{}`",
            args.scenario.display(),
            scenario.kind(),
            kind
        )));
    }
    let report = match &args.sweep {
        Some(spec) => run_sweep(&doc, &spec.parse::<SweepSpec>()?)?,
        None => run(&scenario)?,
    };
    let rendered = render(&report, args.format, args.table.as_deref())?;
    match &args.out {
        Some(path) => {
            for p in write(&rendered, path)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", rendered.joined()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Twc(a) => (Kind::Twc, a),
        Command::Afshar(a) => (Kind::Afshar, a),
        Command::Cqed(a) => (Kind::Cqed, a),
        Command::Custom(a) => (Kind::CustomCircuit, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", Path::new(&args.scenario).display());
            ExitCode::FAILURE
        }
    }
}
