//! Codec parameters from a TOML file and command-line flags.

use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;
use spikecodec::population::linear_distribution;
use spikecodec::rate::{default_filter_spec, FilterKind, FilterSpec, BSA_DEFAULT_THRESHOLD};
use spikecodec::{validate_params, CodecParams, FirFilter, Scheme, Signal};

use crate::error::{CliError, CliResult};

#[derive(Args, Debug, Clone, Default)]
pub struct CodecArgs {
    /// Coding scheme: tbr, sf, mw, hsa, thsa, bsa, grf or position
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// TOML file with parameter values; flags override it
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Spike threshold (SF, MW, T-HSA, BSA)
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Standard-deviation factor for the TBR threshold
    #[arg(long)]
    pub factor: Option<f64>,
    /// Moving-window length (MW)
    #[arg(long)]
    pub window: Option<usize>,
    /// FIR filter shape for rate coders: gaussian, triangular or boxcar
    #[arg(long)]
    pub filter_kind: Option<FilterKind>,
    /// FIR filter length in taps
    #[arg(long)]
    pub filter_len: Option<usize>,
    /// FIR filter peak value
    #[arg(long)]
    pub filter_scale: Option<f64>,
    /// Neuron count (GRF, position)
    #[arg(long)]
    pub neurons: Option<usize>,
    /// Sub-timesteps per sample (GRF)
    #[arg(long)]
    pub subtimes: Option<usize>,
    /// Enables probabilistic GRF spiking with this seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum FilterSource {
    Taps(Vec<f64>),
    Spec { kind: Option<FilterKind>, length: Option<usize>, scale: Option<f64> },
}

/// On-disk parameter file. Accepts the output of `spikecodec tune`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    scheme: Option<Scheme>,
    factor: Option<f64>,
    threshold: Option<f64>,
    window: Option<usize>,
    filter: Option<FilterSource>,
    neurons: Option<usize>,
    subtimes: Option<usize>,
    distribution: Option<Vec<f64>>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
enum FilterChoice {
    Unset,
    Taps(Vec<f64>),
    Spec { kind: Option<FilterKind>, length: Option<usize>, scale: Option<f64> },
}

/// Merged parameter values, before anything is derived from a signal.
#[derive(Debug, Clone)]
pub struct Settings {
    pub scheme: Scheme,
    factor: Option<f64>,
    threshold: Option<f64>,
    window: Option<usize>,
    filter: FilterChoice,
    neurons: Option<usize>,
    subtimes: Option<usize>,
    distribution: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

pub fn is_rate(scheme: Scheme) -> bool {
    matches!(scheme, Scheme::Hsa | Scheme::Thsa | Scheme::Bsa)
}

impl CodecArgs {
    pub fn settings(&self) -> CliResult<Settings> {
        let file = match &self.params {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("params file {}: {e}", path.display())))?;
                toml::from_str::<ParamsFile>(&text)
                    .map_err(|e| CliError::input(format!("params file {}: {}", path.display(), e.message())))?
            }
            None => ParamsFile::default(),
        };
        let scheme = match (self.scheme, file.scheme) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::usage(format!("--scheme {a} conflicts with scheme {b} in the params file")))
            }
            (Some(s), _) | (None, Some(s)) => s,
            (None, None) => return Err(CliError::usage("no scheme given; pass --scheme")),
        };
        let flags_touch_filter = self.filter_kind.is_some() || self.filter_len.is_some() || self.filter_scale.is_some();
        let filter = match (file.filter, flags_touch_filter) {
            (Some(FilterSource::Taps(_)), true) => {
                return Err(CliError::usage("--filter-* flags cannot adjust an explicit tap list"))
            }
            (Some(FilterSource::Taps(t)), false) => FilterChoice::Taps(t),
            (Some(FilterSource::Spec { kind, length, scale }), _) => FilterChoice::Spec {
                kind: self.filter_kind.or(kind),
                length: self.filter_len.or(length),
                scale: self.filter_scale.or(scale),
            },
            (None, true) => {
                FilterChoice::Spec { kind: self.filter_kind, length: self.filter_len, scale: self.filter_scale }
            }
            (None, false) => FilterChoice::Unset,
        };
        Ok(Settings {
            scheme,
            factor: self.factor.or(file.factor),
            threshold: self.threshold.or(file.threshold),
            window: self.window.or(file.window),
            filter,
            neurons: self.neurons.or(file.neurons),
            subtimes: self.subtimes.or(file.subtimes),
            distribution: file.distribution,
            seed: self.seed.or(file.seed),
        })
    }
}

impl Settings {
    fn check_common(&self) -> CliResult<()> {
        if self.seed.is_some() && self.scheme != Scheme::Grf {
            return Err(CliError::usage(format!("--seed has no effect on {}", self.scheme)));
        }
        if self.filter != FilterChoice::Unset && !is_rate(self.scheme) {
            return Err(CliError::usage(format!("{} takes no filter", self.scheme)));
        }
        Ok(())
    }

    fn base(&self) -> CodecParams {
        let mut p = CodecParams::empty(self.scheme);
        p.factor = self.factor;
        p.threshold = self.threshold;
        p.window = self.window;
        p.subtimes = self.subtimes;
        if self.scheme == Scheme::Bsa && p.threshold.is_none() {
            p.threshold = Some(BSA_DEFAULT_THRESHOLD);
        }
        p
    }

    /// Completes the parameters for one channel. Missing rate-coder filters
    /// and position distributions are derived from the channel itself.
    pub fn params_for(&self, signal: &Signal) -> CliResult<CodecParams> {
        self.check_common()?;
        let mut p = self.base();
        if is_rate(self.scheme) {
            let filter = match &self.filter {
                FilterChoice::Taps(t) => FirFilter::new(t.clone()).map_err(CliError::params)?,
                FilterChoice::Unset => default_filter_spec(signal).build().map_err(CliError::params)?,
                FilterChoice::Spec { kind, length, scale } => {
                    let d = default_filter_spec(signal);
                    FilterSpec {
                        kind: kind.unwrap_or(d.kind),
                        length: length.unwrap_or(d.length),
                        scale: scale.unwrap_or(d.scale),
                    }
                    .build()
                    .map_err(CliError::params)?
                }
            };
            p.filter = Some(filter);
        }
        self.population_fields(&mut p, Some((signal.min(), signal.max())))?;
        validate_params(&p).map_err(CliError::params)?;
        Ok(p)
    }

    /// Parameters for sample-by-sample coding, where nothing can be derived
    /// from the whole signal. Not used for TBR, whose stream threshold is
    /// fixed or calibrated separately. `range` supplies the value bounds that
    /// population coders would otherwise take from it.
    pub fn stream_params(&self, range: Option<(f64, f64)>) -> CliResult<CodecParams> {
        self.check_common()?;
        if is_rate(self.scheme) {
            return Err(CliError::usage(format!(
                "{} needs the whole signal (its offset is the global minimum) and cannot stream",
                self.scheme
            )));
        }
        let mut p = self.base();
        self.population_fields(&mut p, range)?;
        validate_params(&p).map_err(CliError::params)?;
        Ok(p)
    }

    fn population_fields(&self, p: &mut CodecParams, range: Option<(f64, f64)>) -> CliResult<()> {
        if self.scheme != Scheme::Position {
            p.neurons = self.neurons;
            p.distribution = self.distribution.clone();
            return Ok(());
        }
        p.distribution = match (&self.distribution, self.neurons) {
            (Some(_), Some(_)) => return Err(CliError::usage("give either a distribution or --neurons, not both")),
            (Some(d), None) => Some(d.clone()),
            (None, Some(m)) => match range {
                Some((lo, hi)) => Some(linear_distribution(lo, hi, m)),
                None => return Err(CliError::usage("--neurons needs --range-min and --range-max when streaming")),
            },
            (None, None) => None,
        };
        Ok(())
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn factor(&self) -> Option<f64> {
        self.factor
    }
}
