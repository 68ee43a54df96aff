//! `encode` and `decode`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use spikecodec::population::{grf_encode_mode, GrfMode};
use spikecodec::{encode, CodecParams, Encoded, Scheme, Signal};

use crate::error::{CliError, CliResult};
use crate::events::{parse_events, sidecar_path, EncodedSignal, Sidecar};
use crate::params::{CodecArgs, Settings};
use crate::signal_csv::{read_signal, write_signal};

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Signal CSV with a `t,value[,channel]` header
    #[arg(long, short)]
    pub input: PathBuf,
    /// Event file to write; the sidecar goes next to it as `<output>.params`
    #[arg(long, short)]
    pub output: PathBuf,
    /// Declared sample rate in Hz (inferred from the timestamps if omitted)
    #[arg(long)]
    pub sample_rate: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Event file written by `encode`
    #[arg(long, short)]
    pub input: PathBuf,
    /// Sidecar file (defaults to `<input>.params`)
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Reconstructed signal CSV (stdout if omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn read_signal_file(path: &Path, rate: Option<f64>) -> CliResult<Signal> {
    let file = fs::File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    read_signal(io::BufReader::new(file), rate)
}

/// Encodes each channel independently.
pub fn encode_signal(signal: &Signal, settings: &Settings) -> CliResult<(EncodedSignal, Vec<CodecParams>)> {
    let mut channels = Vec::with_capacity(signal.channels());
    let mut params = Vec::with_capacity(signal.channels());
    for channel in signal.split_channels() {
        let p = settings.params_for(&channel)?;
        let encoded = match (settings.scheme, settings.seed) {
            (Scheme::Grf, Some(seed)) => Encoded::Grf(grf_encode_mode(
                &channel,
                p.neurons.expect("validated"),
                p.subtimes.expect("validated"),
                GrfMode::Probabilistic { seed },
            )?),
            _ => encode(&channel, &p)?,
        };
        channels.push(encoded);
        params.push(p);
    }
    let encoded = EncodedSignal {
        scheme: settings.scheme,
        sample_rate: signal.sample_rate(),
        t0: signal.t0(),
        samples: signal.len(),
        seed: settings.seed,
        channels,
    };
    Ok((encoded, params))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn run_encode(args: &EncodeArgs) -> CliResult<()> {
    let settings = args.codec.settings()?;
    let signal = read_signal_file(&args.input, args.sample_rate)?;
    let (encoded, params) = encode_signal(&signal, &settings)?;
    write_file(&args.output, &encoded.to_event_file())?;
    write_file(&sidecar_path(&args.output), &encoded.sidecar(&params).to_toml())?;
    Ok(())
}

pub fn run_decode(args: &DecodeArgs) -> CliResult<()> {
    let side_path = args.sidecar.clone().unwrap_or_else(|| sidecar_path(&args.input));
    let side_text =
        fs::read_to_string(&side_path).map_err(|e| CliError::input(format!("sidecar {}: {e}", side_path.display())))?;
    let side = Sidecar::from_toml(&side_text)?;
    let text =
        fs::read_to_string(&args.input).map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
    let decoded = parse_events(&text, &side)?.decode()?;
    match &args.output {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            write_signal(io::BufWriter::new(file), &decoded)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_signal(&mut lock, &decoded)?;
            lock.flush().map_err(|e| CliError::input(e.to_string()))
        }
    }
}
