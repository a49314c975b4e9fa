//! `qamlab`: exact runs of the protocol verifiers, the alternating-machine
//! search, the tree evaluator and the halting bound, reported as JSON.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Global;

#[derive(Parser)]
#[command(
    name = "qamlab",
    version,
    about = "Exact simulator for quantum Arthur-Merlin protocols and alternation"
)]
struct Cli {
    /// Emit JSON (the only format; accepted for scripts that pass it).
    #[arg(long, global = true)]
    json: bool,
    /// Include per-step traces and witness trees in the report.
    #[arg(long, global = true)]
    trace: bool,
    /// Transcript symbols per round before a path counts as pending.
    #[arg(long, global = true, value_name = "N")]
    max_transcript: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long, default_value = "")]
    input: String,
    /// honest, defect:C:D:DELTA, skip:I, premature, silent, wrong-length,
    /// fixed:l or fixed:r
    #[arg(long, default_value = "honest")]
    prover: String,
    /// `closed-form` or a round count for provers that change between rounds.
    #[arg(long, default_value = "closed-form")]
    rounds: String,
}

#[derive(Subcommand)]
enum Command {
    /// The SUBSET-SUM protocol on an instance `S$a1$...$an$` in binary.
    SubsetSum {
        instance: String,
        /// 1-based indices the prover announces, comma separated.
        #[arg(long, conflicts_with = "maximize")]
        selection: Option<String>,
        /// Best overall acceptance over every selection (the default).
        #[arg(long)]
        maximize: bool,
    },
    /// The weak protocol for a deterministic machine.
    DtmProtocol(ProtocolArgs),
    /// The strong protocol for an alternating machine.
    AtmProtocol(ProtocolArgs),
    /// Accepting-subtree search on a protocol machine or a table automaton.
    Q1afa {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        /// Step limit for machines not certified to halt.
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Builds and evaluates the three-valued tree of a verifier spec.
    TreeEval {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Halting index of an operation-element system.
    HaltingBound {
        #[arg(long)]
        elements: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.json;
    let g = Global {
        trace: cli.trace,
        max_transcript: cli.max_transcript,
        argv: std::env::args().skip(1).collect(),
    };
    let result = match &cli.command {
        Command::SubsetSum {
            instance, selection, ..
        } => commands::subset_sum(&g, instance, selection.as_deref()),
        Command::DtmProtocol(a) => commands::protocol(&g, "dtm-protocol", &a.machine, &a.input, &a.prover, &a.rounds),
        Command::AtmProtocol(a) => commands::protocol(&g, "atm-protocol", &a.machine, &a.input, &a.prover, &a.rounds),
        Command::Q1afa { machine, input, depth } => commands::q1afa(&g, machine, input, *depth),
        Command::TreeEval { spec } => commands::tree_eval(&g, spec),
        Command::HaltingBound { elements } => commands::halting_bound(&g, elements),
    };
    match result {
        Ok(v) => {
            // A closed pipe (`| head`) is not an error worth a panic.
            let text = serde_json::to_string_pretty(&v).expect("serializable");
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code() as u8)
        }
    }
}
