//! `bench`, `tune` and `generate`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use spikecodec::bench::{run_benchmark, BenchConfig};
use spikecodec::lab::{generate, SignalSpec};
use spikecodec::population::linear_distribution;
use spikecodec::rate::FilterSpec;
use spikecodec::tune::{tune, Objective, ParamGrid};
use spikecodec::Scheme;

use crate::codec_cmd::read_signal_file;
use crate::error::{CliError, CliResult};
use crate::signal_csv::write_signal;

/// Environment variable naming the default benchmark config file.
pub const CONFIG_ENV: &str = "SPIKECODEC_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Md,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Benchmark config (TOML). Falls back to $SPIKECODEC_CONFIG, then to
    /// the built-in defaults
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Report file (stdout if omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Md)]
    pub format: ReportFormat,
    /// Override the samples per case
    #[arg(long)]
    pub samples: Option<usize>,
    /// Override the durations, e.g. `1,5,15`
    #[arg(long, value_delimiter = ',')]
    pub durations: Option<Vec<f64>>,
    /// Override the master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores); never changes the report
    #[arg(long)]
    pub workers: Option<usize>,
    /// Print the resolved config and exit
    #[arg(long)]
    pub print_config: bool,
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::input(e.to_string()))
        }
    }
}

pub fn load_bench_config(explicit: Option<&Path>) -> CliResult<BenchConfig> {
    let path = match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
    };
    let Some(path) = path else {
        return Ok(BenchConfig::default());
    };
    let text =
        fs::read_to_string(&path).map_err(|e| CliError::usage(format!("bench config {}: {e}", path.display())))?;
    BenchConfig::from_toml(&text).map_err(|e| CliError::input(format!("bench config {}: {e}", path.display())))
}

pub fn run_bench(args: &BenchArgs) -> CliResult<()> {
    let mut cfg = load_bench_config(args.config.as_deref())?;
    if let Some(n) = args.samples {
        cfg.samples_per_case = n;
    }
    if let Some(d) = &args.durations {
        cfg.durations = d.clone();
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.validate().map_err(CliError::params)?;
    if args.print_config {
        return write_out(args.output.as_deref(), &cfg.to_toml());
    }
    let report = run_benchmark(&cfg)?;
    let text = match args.format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Md => report.to_markdown(),
    };
    write_out(args.output.as_deref(), &text)?;
    if args.output.is_some() {
        print!("{}", report.summary());
    }
    eprintln!("bench finished in {:.2} s", report.wall_time.as_secs_f64());
    Ok(())
}

/// Candidate lists; only those the scheme needs are read.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    #[serde(default)]
    factors: Vec<f64>,
    #[serde(default)]
    thresholds: Vec<f64>,
    #[serde(default)]
    windows: Vec<usize>,
    #[serde(default)]
    filters: Vec<FilterSpec>,
    #[serde(default)]
    neurons: Vec<usize>,
    #[serde(default)]
    subtimes: Vec<usize>,
    #[serde(default)]
    distributions: Vec<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct TuneArgs {
    /// Coding scheme to tune
    #[arg(long)]
    pub scheme: Scheme,
    /// Single-channel signal CSV
    #[arg(long, short)]
    pub input: PathBuf,
    /// Grid file (TOML lists: factors, thresholds, windows, filters, neurons, subtimes, distributions)
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Weight on reconstruction RMSE
    #[arg(long, default_value_t = 1.0)]
    pub rmse_weight: f64,
    /// Weight on (100 - spiking efficiency)
    #[arg(long, default_value_t = 0.0)]
    pub efficiency_weight: f64,
    /// Where to write the winning parameters (stdout if omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run_tune(args: &TuneArgs) -> CliResult<()> {
    let text =
        fs::read_to_string(&args.grid).map_err(|e| CliError::usage(format!("grid {}: {e}", args.grid.display())))?;
    let g: GridFile = toml::from_str(&text).map_err(|e| CliError::input(format!("grid: {}", e.message())))?;
    let signal = read_signal_file(&args.input, args.sample_rate)?;
    if signal.channels() != 1 {
        return Err(CliError::input("tune takes a single-channel signal"));
    }
    let mut grid = ParamGrid {
        factors: g.factors,
        thresholds: g.thresholds,
        windows: g.windows,
        filters: g.filters.iter().map(FilterSpec::build).collect::<Result<_, _>>().map_err(CliError::params)?,
        neurons: g.neurons,
        subtimes: g.subtimes,
        distributions: g.distributions,
    };
    if args.scheme == Scheme::Position && grid.distributions.is_empty() {
        grid.distributions = grid.neurons.iter().map(|&m| linear_distribution(signal.min(), signal.max(), m)).collect();
    }
    let objective = Objective { rmse_weight: args.rmse_weight, efficiency_weight: args.efficiency_weight };
    let best = tune(args.scheme, &signal, &grid, objective).map_err(|e| match e {
        spikecodec::CodecError::EmptyGrid => CliError::usage(format!("grid has no candidates for {}", args.scheme)),
        other => CliError::Codec(other),
    })?;
    eprintln!("best score {:.6}: efficiency {:.2}%, rmse {:.6}", best.score, best.efficiency, best.rmse);
    let text = toml::to_string(&best.params).expect("params serialize");
    write_out(args.output.as_deref(), &text)
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Signal spec (TOML); defaults to the 1/2/5 Hz mixture, 4 s at 100 Hz
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub sample_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noise_std: Option<f64>,
    /// Signal CSV (stdout if omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Print the resolved spec instead of the signal
    #[arg(long)]
    pub print_spec: bool,
}

pub fn run_generate(args: &GenerateArgs) -> CliResult<()> {
    let mut spec = match &args.spec {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::usage(format!("spec {}: {e}", p.display())))?;
            SignalSpec::from_toml(&text).map_err(|e| CliError::input(format!("spec {}: {e}", p.display())))?
        }
        None => SignalSpec::default(),
    };
    if let Some(d) = args.duration {
        spec.duration = d;
    }
    if let Some(r) = args.sample_rate {
        spec.sample_rate = r;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(n) = args.noise_std {
        spec.noise_std = n;
    }
    spec.validate().map_err(CliError::params)?;
    if args.print_spec {
        return write_out(args.output.as_deref(), &spec.to_toml());
    }
    let signal = generate(&spec)?;
    let mut buf = Vec::new();
    write_signal(&mut buf, &signal)?;
    write_out(args.output.as_deref(), std::str::from_utf8(&buf).expect("csv is utf-8"))
}
