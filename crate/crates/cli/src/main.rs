//! `spikecodec`: encode, decode and benchmark spike trains from the shell.
//!
//! Exit codes: 0 success, 2 bad arguments or missing config, 3 malformed or
//! unreadable input, 4 codec failure.

mod codec_cmd;
mod error;
mod events;
mod params;
mod signal_csv;
mod stream;
mod tools;

use std::io;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

use crate::codec_cmd::{run_decode, run_encode, DecodeArgs, EncodeArgs};
use crate::error::CliResult;
use crate::stream::StreamArgs;
use crate::tools::{run_bench, run_generate, run_tune, BenchArgs, GenerateArgs, TuneArgs};

#[derive(Parser, Debug)]
#[command(name = "spikecodec", version, about = "Spike-train encoders and decoders for sampled signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode a signal CSV into an event file plus parameter sidecar
    Encode(EncodeArgs),
    /// Reconstruct a signal CSV from an event file and its sidecar
    Decode(DecodeArgs),
    /// Encode samples read line by line from stdin
    Stream(StreamArgs),
    /// Run the Monte-Carlo benchmark
    Bench(BenchArgs),
    /// Grid-search codec parameters on a signal
    Tune(TuneArgs),
    /// Write a synthetic test signal
    Generate(GenerateArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Encode(a) => run_encode(&a),
        Command::Decode(a) => run_decode(&a),
        Command::Stream(a) => stream::stream(&a, io::stdin().lock(), io::stdout().lock(), io::stderr()),
        Command::Bench(a) => run_bench(&a),
        Command::Tune(a) => run_tune(&a),
        Command::Generate(a) => run_generate(&a),
    }
}

/// Usage line of the named subcommand, or of the whole tool.
fn usage_for(subcommand: Option<&str>) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    match subcommand.and_then(|name| cmd.find_subcommand_mut(name)) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() && !e.to_string().contains("Usage:") {
                eprintln!("\n{}", usage_for(std::env::args().nth(1).as_deref()));
            }
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spikecodec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
