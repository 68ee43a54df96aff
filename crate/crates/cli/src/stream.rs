//! `stream`: samples on stdin, event records on stdout.
//!
//! Records use the event-file layout without tag or trailer. Each record is
//! flushed before the next sample is read. Coders that need a short prefix
//! (MW's first window, a TBR calibration run) release the buffered records
//! together once it is complete.

use std::io::{BufRead, Write};

use clap::Args;
use spikecodec::population::{GrfMode, GrfParams, GrfStream, PositionStream};
use spikecodec::temporal::{MwStream, SfStream, TbrStream, TbrThreshold};
use spikecodec::Scheme;

use crate::error::{CliError, CliResult};
use crate::params::CodecArgs;

#[derive(Args, Debug)]
pub struct StreamArgs {
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Sample rate in Hz, used for event timestamps
    #[arg(long, default_value_t = 1.0)]
    pub sample_rate: f64,
    /// Timestamp of the first sample
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    /// TBR: derive the threshold from this many leading samples
    #[arg(long, value_name = "SAMPLES")]
    pub calibration: Option<usize>,
    /// Lower value bound for population coders
    #[arg(long, allow_negative_numbers = true)]
    pub range_min: Option<f64>,
    /// Upper value bound for population coders
    #[arg(long, allow_negative_numbers = true)]
    pub range_max: Option<f64>,
}

enum Coder {
    Tbr(TbrStream),
    Sf(SfStream),
    Mw(MwStream),
    Position(PositionStream),
    Grf(GrfStream),
}

impl Coder {
    fn build(args: &StreamArgs) -> CliResult<Self> {
        let settings = args.codec.settings()?;
        if args.calibration.is_some() && settings.scheme != Scheme::Tbr {
            return Err(CliError::usage("--calibration only applies to tbr"));
        }
        let range = match (args.range_min, args.range_max) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            (None, None) => None,
            _ => return Err(CliError::usage("give both --range-min and --range-max")),
        };
        if settings.scheme == Scheme::Tbr {
            let mode = match (settings.threshold(), args.calibration) {
                (Some(t), None) => TbrThreshold::Fixed(t),
                (None, Some(len)) => {
                    let factor = settings.factor().ok_or_else(|| CliError::usage("--calibration needs --factor"))?;
                    TbrThreshold::Calibrate { factor, len }
                }
                (Some(_), Some(_)) => return Err(CliError::usage("give --threshold or --calibration, not both")),
                (None, None) => {
                    return Err(CliError::usage("tbr streaming needs --threshold or --calibration with --factor"))
                }
            };
            return TbrStream::new(mode).map(Coder::Tbr).map_err(CliError::params);
        }
        let p = settings.stream_params(range)?;
        let threshold = || p.threshold.expect("validated");
        Ok(match settings.scheme {
            Scheme::Sf => Coder::Sf(SfStream::new(threshold()).map_err(CliError::params)?),
            Scheme::Mw => {
                Coder::Mw(MwStream::new(p.window.expect("validated"), threshold()).map_err(CliError::params)?)
            }
            Scheme::Position => Coder::Position(
                PositionStream::new(p.distribution.clone().expect("validated")).map_err(CliError::params)?,
            ),
            Scheme::Grf => {
                let (lo, hi) = range.ok_or_else(|| CliError::usage("grf streaming needs --range-min/--range-max"))?;
                let gp = GrfParams::new(p.neurons.expect("validated"), p.subtimes.expect("validated"), lo, hi)
                    .map_err(CliError::params)?;
                let mode = settings.seed.map_or(GrfMode::Latency, |seed| GrfMode::Probabilistic { seed });
                Coder::Grf(GrfStream::new(gp, mode))
            }
            _ => unreachable!("rate coders rejected by stream_params"),
        })
    }
}

struct Emitter<W: Write> {
    out: W,
    rate: f64,
    t0: f64,
    /// Index of the next sample whose polarity has not been written.
    next: usize,
}

impl<W: Write> Emitter<W> {
    fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 / self.rate
    }

    fn polarities(&mut self, p: &[i8]) -> std::io::Result<()> {
        for &s in p {
            if s != 0 {
                writeln!(self.out, "{},{s},0", self.time(self.next))?;
            }
            self.next += 1;
        }
        self.out.flush()
    }

    fn population(&mut self, i: usize, fired: &[(usize, usize)]) -> std::io::Result<()> {
        for (sub, neuron) in fired {
            writeln!(self.out, "{},{neuron},{sub},0", self.time(i))?;
        }
        self.out.flush()
    }
}

/// Runs the stream loop over arbitrary reader/writers.
pub fn stream<R: BufRead, W: Write, E: Write>(args: &StreamArgs, input: R, out: W, mut err: E) -> CliResult<()> {
    if !(args.sample_rate.is_finite() && args.sample_rate > 0.0) {
        return Err(CliError::usage(format!("sample rate {} must be > 0", args.sample_rate)));
    }
    let mut coder = Coder::build(args)?;
    let mut em = Emitter { out, rate: args.sample_rate, t0: args.t0, next: 0 };
    let io = |e: std::io::Error| CliError::input(format!("stream: {e}"));
    let mut index = 0;
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(io)?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let x = match text.parse::<f64>() {
            Ok(x) if x.is_finite() => x,
            _ => {
                let _ = writeln!(err, "warning: line {}: skipping non-numeric sample {text:?}", n + 1);
                continue;
            }
        };
        match &mut coder {
            Coder::Tbr(s) => em.polarities(&s.push(x)),
            Coder::Sf(s) => em.polarities(&[s.push(x)]),
            Coder::Mw(s) => em.polarities(&s.push(x)),
            Coder::Position(s) => em.population(index, &[(0, s.push(x))]),
            Coder::Grf(s) => em.population(index, &s.push(x)),
        }
        .map_err(io)?;
        index += 1;
    }
    if let Coder::Tbr(s) = &mut coder {
        em.polarities(&s.finish()).map_err(io)?;
    }
    if em.next < index && matches!(coder, Coder::Mw(_)) {
        let _ = writeln!(err, "warning: input ended before the first moving window filled; nothing emitted");
    }
    Ok(())
}
