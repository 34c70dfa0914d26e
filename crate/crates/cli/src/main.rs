//! Batch front door: parse a JSON workspace, run one command, report.
//!
//! Exit codes: 0 success; 1 mathematical negative (for example no
//! injection exists); 2 input error; 3 budget or hypothesis failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use injcog_cli::format::parse_str;
use injcog_cli::run::{err_envelope, ok_envelope, run, CliError, Flags};

#[derive(Parser)]
#[command(
    name = "injcog",
    version,
    about = "Exact injective capacities, cogenerator numbers, and explicit module embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON workspace file.
    workspace: PathBuf,
    /// Seed for every deterministic random choice (decomposition splitting,
    /// sampling). Overrides the request block's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict the capacity infimum to inclusion-maximal associated primes.
    #[arg(long)]
    maximal_only: bool,
    /// Emit a machine-readable JSON report on stdout.
    #[arg(long)]
    json: bool,
    /// Include the replayable synthesis trace in the report.
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate the workspace.
    Validate(Common),
    /// List the local components of a structure-constant ring.
    Decompose(Common),
    /// Associated primes of the requested domain module.
    Ass(Common),
    /// Socle dimensions of the domain module at its associated primes.
    Socle(Common),
    /// Basis (or generators) of the hom space of the requested pair.
    HomBasis(Common),
    /// Injective capacity of the requested pair over the requested hom set.
    Inj(Common),
    /// Number of cogenerators of the requested pair.
    Cog(Common),
    /// Does the span of the hom set contain an injective map?
    HasInjection(Common),
    /// Build a row of maps whose prefixes are injective per site.
    SynthesizeRow(Common),
    /// Build a column of maps whose prefixes are injective per site.
    SynthesizeColumn(Common),
    /// Glue homogeneous local injections into one graded injection.
    SynthesizeGraded(Common),
    /// Check every map of the hom set for injectivity, with witnesses.
    CheckInjective(Common),
    /// Run the brute-force oracle and diff it against the pipeline.
    Oracle(Common),
}

impl Command {
    fn split(&self) -> (&'static str, &Common) {
        match self {
            Command::Validate(c) => ("validate", c),
            Command::Decompose(c) => ("decompose", c),
            Command::Ass(c) => ("ass", c),
            Command::Socle(c) => ("socle", c),
            Command::HomBasis(c) => ("hom-basis", c),
            Command::Inj(c) => ("inj", c),
            Command::Cog(c) => ("cog", c),
            Command::HasInjection(c) => ("has-injection", c),
            Command::SynthesizeRow(c) => ("synthesize-row", c),
            Command::SynthesizeColumn(c) => ("synthesize-column", c),
            Command::SynthesizeGraded(c) => ("synthesize-graded", c),
            Command::CheckInjective(c) => ("check-injective", c),
            Command::Oracle(c) => ("oracle", c),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = cli.command.split();

    let fail = |err: CliError| -> ExitCode {
        if common.json {
            println!("{}", err_envelope(command, &err));
        } else {
            eprintln!("error: {}", err.message());
        }
        ExitCode::from(err.exit_code() as u8)
    };

    let text = match std::fs::read_to_string(&common.workspace) {
        Ok(t) => t,
        Err(e) => {
            return fail(CliError::Input(format!(
                "cannot read {}: {e}",
                common.workspace.display()
            )))
        }
    };
    let ws = match parse_str(&text) {
        Ok(ws) => ws,
        Err(e) => return fail(CliError::Input(e)),
    };
    let flags = Flags {
        seed: common.seed.or(ws.doc.request.seed).unwrap_or(0),
        maximal_only: common.maximal_only,
        trace: common.trace,
    };
    match run(command, &ws, &flags) {
        Ok(report) => {
            if common.json {
                println!("{}", ok_envelope(command, &report));
            } else {
                print!("{}", report.human);
            }
            ExitCode::SUCCESS
        }
        Err(err) => fail(err),
    }
}
