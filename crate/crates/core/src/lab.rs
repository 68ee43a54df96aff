//! Synthetic benchmark signals and evaluation metrics.
//!
//! Noise is drawn from ChaCha8 seeded with the spec's 64-bit seed, so a spec
//! maps to the same samples on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CodecError, Result};
use crate::types::{PopulationSpikes, Signal, SpikeTrain};

pub const SIGNAL_SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineComponent {
    pub frequency: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Sum of sines plus white gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalSpecFile", into = "SignalSpecFile")]
pub struct SignalSpec {
    pub components: Vec<SineComponent>,
    pub noise_std: f64,
    pub duration: f64,
    pub sample_rate: f64,
    pub seed: u64,
}

impl Default for SignalSpec {
    /// 1/2/5 Hz mixture with a peak-to-trough span close to 5.8, sampled at
    /// 100 Hz for 4 s.
    fn default() -> Self {
        Self {
            components: [1.0, 2.0, 5.0]
                .into_iter()
                .map(|frequency| SineComponent { frequency, amplitude: DEFAULT_AMPLITUDE, phase: 0.0 })
                .collect(),
            noise_std: DEFAULT_NOISE_STD,
            duration: 4.0,
            sample_rate: 100.0,
            seed: 0,
        }
    }
}

impl SignalSpec {
    /// The default mixture sampled at 200 Hz, used by the benchmark.
    pub fn benchmark() -> Self {
        Self { sample_rate: 200.0, ..Self::default() }
    }
}

pub const DEFAULT_AMPLITUDE: f64 = 1.3;
pub const DEFAULT_NOISE_STD: f64 = 0.1;

impl SignalSpec {
    pub fn sample_count(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CodecError::InvalidSpec(m));
        if self.components.is_empty() {
            return bad("at least one sine component is required".into());
        }
        for c in &self.components {
            if !(c.frequency.is_finite() && c.frequency > 0.0) {
                return bad(format!("frequency {} must be > 0", c.frequency));
            }
            if !c.amplitude.is_finite() || !c.phase.is_finite() {
                return bad("amplitudes and phases must be finite".into());
            }
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return bad(format!("noise_std {} must be >= 0", self.noise_std));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad(format!("duration {} must be > 0", self.duration));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return bad(format!("sample_rate {} must be > 0", self.sample_rate));
        }
        if self.sample_count() < 2 {
            return bad("duration x sample_rate must give at least 2 samples".into());
        }
        Ok(())
    }

    pub fn with_duration(&self, duration: f64) -> Self {
        Self { duration, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("signal spec serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CodecError::InvalidSpec(e.message().to_string()))
    }
}

/// Flat on-disk form of [`SignalSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalSpecFile {
    version: u32,
    duration: f64,
    sample_rate: f64,
    noise_std: f64,
    seed: u64,
    frequencies: Vec<f64>,
    amplitudes: Vec<f64>,
    #[serde(default)]
    phases: Option<Vec<f64>>,
}

impl TryFrom<SignalSpecFile> for SignalSpec {
    type Error = CodecError;

    fn try_from(f: SignalSpecFile) -> Result<Self> {
        if f.version != SIGNAL_SPEC_VERSION {
            return Err(CodecError::InvalidSpec(format!("unsupported version {}", f.version)));
        }
        let phases = f.phases.unwrap_or_else(|| vec![0.0; f.frequencies.len()]);
        if f.amplitudes.len() != f.frequencies.len() || phases.len() != f.frequencies.len() {
            return Err(CodecError::InvalidSpec("frequencies, amplitudes and phases differ in length".into()));
        }
        let components = f
            .frequencies
            .iter()
            .zip(&f.amplitudes)
            .zip(&phases)
            .map(|((&frequency, &amplitude), &phase)| SineComponent { frequency, amplitude, phase })
            .collect();
        let spec = SignalSpec {
            components,
            noise_std: f.noise_std,
            duration: f.duration,
            sample_rate: f.sample_rate,
            seed: f.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<SignalSpec> for SignalSpecFile {
    fn from(s: SignalSpec) -> Self {
        Self {
            version: SIGNAL_SPEC_VERSION,
            duration: s.duration,
            sample_rate: s.sample_rate,
            noise_std: s.noise_std,
            seed: s.seed,
            frequencies: s.components.iter().map(|c| c.frequency).collect(),
            amplitudes: s.components.iter().map(|c| c.amplitude).collect(),
            phases: Some(s.components.iter().map(|c| c.phase).collect()),
        }
    }
}

pub fn generate(spec: &SignalSpec) -> Result<Signal> {
    spec.validate()?;
    let n = spec.sample_count();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / spec.sample_rate;
            let clean: f64 = spec
                .components
                .iter()
                .map(|c| c.amplitude * (2.0 * std::f64::consts::PI * c.frequency * t + c.phase).sin())
                .sum();
            if spec.noise_std > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                clean + spec.noise_std * z
            } else {
                clean
            }
        })
        .collect();
    Signal::new(samples, spec.sample_rate)
}

/// Anything with per-timestamp spike slots.
pub trait SpikeRecord {
    fn timestamps(&self) -> usize;
    fn spiking_timestamps(&self) -> usize;
}

impl SpikeRecord for SpikeTrain {
    fn timestamps(&self) -> usize {
        self.len()
    }

    fn spiking_timestamps(&self) -> usize {
        self.spike_count()
    }
}

impl SpikeRecord for PopulationSpikes {
    fn timestamps(&self) -> usize {
        self.timesteps()
    }

    fn spiking_timestamps(&self) -> usize {
        (0..self.timesteps()).filter(|&t| self.fired_at(t)).count()
    }
}

/// Percentage of timestamps without any spike. Empty records count as 100.
pub fn spiking_efficiency<R: SpikeRecord + ?Sized>(record: &R) -> f64 {
    let total = record.timestamps();
    if total == 0 {
        return 100.0;
    }
    (1.0 - record.spiking_timestamps() as f64 / total as f64) * 100.0
}

fn check_lengths(a: &Signal, b: &Signal) -> Result<()> {
    if a.samples().len() != b.samples().len() {
        return Err(CodecError::LengthMismatch { left: a.samples().len(), right: b.samples().len() });
    }
    Ok(())
}

fn rmse_slice(a: &[f64], b: &[f64]) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (sq / a.len() as f64).sqrt()
}

pub fn rmse(a: &Signal, b: &Signal) -> Result<f64> {
    check_lengths(a, b)?;
    Ok(rmse_slice(a.samples(), b.samples()))
}

/// RMSE per non-overlapping window plus the least-squares slope of those
/// values against window index.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftProfile {
    pub windows: Vec<f64>,
    pub slope: f64,
}

/// Windowed RMSE over consecutive full windows; a trailing partial window is
/// dropped.
pub fn drift_profile(a: &Signal, b: &Signal, window: usize) -> Result<DriftProfile> {
    check_lengths(a, b)?;
    if window == 0 {
        return Err(CodecError::OutOfRange { name: "window", reason: "must be >= 1".into() });
    }
    let len = a.samples().len();
    if len < window {
        return Err(CodecError::SignalTooShort { needed: window, got: len });
    }
    let windows: Vec<f64> =
        a.samples().chunks_exact(window).zip(b.samples().chunks_exact(window)).map(|(x, y)| rmse_slice(x, y)).collect();
    Ok(DriftProfile { slope: ls_slope(&windows), windows })
}

fn ls_slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    if y.len() < 2 {
        return 0.0;
    }
    let mx = (n - 1.0) / 2.0;
    let my = y.iter().sum::<f64>() / n;
    let (num, den) = y.iter().enumerate().fold((0.0, 0.0), |(num, den), (i, &v)| {
        let dx = i as f64 - mx;
        (num + dx * (v - my), den + dx * dx)
    });
    num / den
}

/// Mean and sample (n-1) standard deviation; a single value has SD 0.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}
