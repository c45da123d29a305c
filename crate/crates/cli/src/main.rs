//! `ccsynth`: trace-closure checking, strategy synthesis, simulation and
//! DOT export for distributed LTL specifications.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ccsynth::compose::{DEFAULT_MAX_PRODUCT_STATES, MAX_PRODUCT_STATES_ENV};

#[derive(Parser, Debug)]
#[command(name = "ccsynth", version, about = "Synthesize per-agent control and communication strategies from a global LTL specification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Inputs {
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// LTL formula, or a file containing one; defaults to the model's `spec`.
    #[arg(long)]
    spec: Option<String>,
}

#[derive(clap::Args, Debug)]
struct Limits {
    /// Abort when a product exceeds this many states.
    #[arg(long, env = MAX_PRODUCT_STATES_ENV, default_value_t = DEFAULT_MAX_PRODUCT_STATES)]
    max_product_states: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the specification language is closed under trace
    /// equivalence (exit 0 if closed, 3 if not).
    CheckClosure {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Synthesize strategies (exit 0 on success, 3 if not trace-closed, 4 if
    /// no implementable word exists, 5 if a product grows too large).
    Synth {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        limits: Limits,
        /// Strategies file to write; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute strategies under randomized interleavings.
    Simulate {
        /// Model file (JSON).
        #[arg(long)]
        model: PathBuf,
        /// Strategies file, as written by `synth`.
        #[arg(long)]
        strategies: PathBuf,
        /// Seed of the first run; run `k` uses `seed + k`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Stop a run after this many satisfied properties.
        #[arg(long, default_value_t = 200)]
        max_events: usize,
        /// Directory receiving one trace file per run.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print an automaton in DOT format.
    ExportDot {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        limits: Limits,
        /// `bphi`, `bi:AGENT`, `ei:AGENT` or `product`.
        #[arg(long)]
        which: String,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::CheckClosure { inputs } => commands::check_closure(&inputs.model, inputs.spec.as_deref()),
        Command::Synth { inputs, limits, out } => {
            commands::synth(&inputs.model, inputs.spec.as_deref(), limits.max_product_states, out.as_deref())
        }
        Command::Simulate {
            model,
            strategies,
            seed,
            runs,
            max_events,
            out,
        } => commands::simulate(&commands::SimulateArgs {
            model: &model,
            strategies: &strategies,
            seed,
            runs,
            max_events,
            out: out.as_deref(),
        }),
        Command::ExportDot {
            inputs,
            limits,
            which,
            out,
        } => commands::export_dot(
            &inputs.model,
            inputs.spec.as_deref(),
            &which,
            limits.max_product_states,
            out.as_deref(),
        ),
    };
    match result {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code().into()
        }
    }
}
