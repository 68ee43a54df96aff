//! Shared domain types: sampled signals, dense spike trains, population spike
//! cubes, FIR filters and per-scheme parameter bundles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CodecError, Result};

/// Uniformly sampled real-valued signal.
///
/// Multi-channel signals are stored channel-major: all samples of channel 0,
/// then all samples of channel 1, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: f64,
    t0: f64,
    channels: usize,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        Self::with_layout(samples, sample_rate, 0.0, 1)
    }

    pub fn with_layout(samples: Vec<f64>, sample_rate: f64, t0: f64, channels: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(CodecError::InvalidSignal("no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(CodecError::InvalidSignal(format!("sample {i} is not finite")));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(CodecError::InvalidSignal(format!("sample rate {sample_rate} must be > 0")));
        }
        if !t0.is_finite() {
            return Err(CodecError::InvalidSignal("t0 is not finite".into()));
        }
        if channels == 0 || !samples.len().is_multiple_of(channels) {
            return Err(CodecError::InvalidSignal(format!(
                "{} samples cannot be split into {channels} channels",
                samples.len()
            )));
        }
        Ok(Self { samples, sample_rate, t0, channels })
    }

    /// Builds a multi-channel signal from equally long per-channel sequences.
    pub fn from_channels(channels: Vec<Vec<f64>>, sample_rate: f64, t0: f64) -> Result<Self> {
        let n = channels.len();
        let len = channels.first().map_or(0, Vec::len);
        if channels.iter().any(|c| c.len() != len) {
            return Err(CodecError::InvalidSignal("channels have different lengths".into()));
        }
        Self::with_layout(channels.into_iter().flatten().collect(), sample_rate, t0, n)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Number of timestamps (samples per channel).
    pub fn len(&self) -> usize {
        self.samples.len() / self.channels
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn timestamp(&self, index: usize) -> f64 {
        timestamp(self.t0, self.sample_rate, index)
    }

    /// Samples of one channel.
    pub fn channel(&self, channel: usize) -> &[f64] {
        let len = self.len();
        &self.samples[channel * len..(channel + 1) * len]
    }

    /// Splits into independent single-channel signals sharing rate and t0.
    pub fn split_channels(&self) -> Vec<Signal> {
        (0..self.channels)
            .map(|c| Signal {
                samples: self.channel(c).to_vec(),
                sample_rate: self.sample_rate,
                t0: self.t0,
                channels: 1,
            })
            .collect()
    }

    pub(crate) fn require_mono(&self) -> Result<&[f64]> {
        if self.channels != 1 {
            return Err(CodecError::MultiChannel(self.channels));
        }
        Ok(&self.samples)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn timestamp(t0: f64, sample_rate: f64, index: usize) -> f64 {
    t0 + index as f64 / sample_rate
}

/// Dense per-timestamp spike polarities in {-1, 0, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    polarities: Vec<i8>,
    sample_rate: f64,
    t0: f64,
}

/// A single nonzero spike at a timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeEvent {
    pub t: f64,
    pub polarity: i8,
}

impl SpikeTrain {
    pub fn new(polarities: Vec<i8>, sample_rate: f64, t0: f64) -> Result<Self> {
        if let Some(i) = polarities.iter().position(|p| !(-1..=1).contains(p)) {
            return Err(CodecError::InvalidSignal(format!(
                "polarity {} at index {i} is not in {{-1, 0, 1}}",
                polarities[i]
            )));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) || !t0.is_finite() {
            return Err(CodecError::InvalidSignal("invalid sample rate or t0".into()));
        }
        Ok(Self { polarities, sample_rate, t0 })
    }

    pub(crate) fn from_parts(polarities: Vec<i8>, sample_rate: f64, t0: f64) -> Self {
        Self { polarities, sample_rate, t0 }
    }

    pub(crate) fn zeros_like(signal: &Signal) -> Self {
        Self::from_parts(vec![0; signal.len()], signal.sample_rate(), signal.t0())
    }

    pub fn polarities(&self) -> &[i8] {
        &self.polarities
    }

    pub(crate) fn polarities_mut(&mut self) -> &mut [i8] {
        &mut self.polarities
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.polarities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polarities.is_empty()
    }

    pub fn spike_count(&self) -> usize {
        self.polarities.iter().filter(|&&p| p != 0).count()
    }

    /// Sparse view: one event per nonzero polarity, in time order.
    pub fn to_events(&self) -> Vec<SpikeEvent> {
        self.polarities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0)
            .map(|(i, &p)| SpikeEvent { t: timestamp(self.t0, self.sample_rate, i), polarity: p })
            .collect()
    }

    /// Rebuilds a dense train of `len` slots from sparse events.
    pub fn from_events(events: &[SpikeEvent], len: usize, sample_rate: f64, t0: f64) -> Result<Self> {
        let mut polarities = vec![0i8; len];
        for ev in events {
            if ev.polarity != 1 && ev.polarity != -1 {
                return Err(CodecError::InvalidSignal(format!("event polarity {} is not ±1", ev.polarity)));
            }
            let i = time_to_index(ev.t, sample_rate, t0, len)?;
            polarities[i] = ev.polarity;
        }
        Self::new(polarities, sample_rate, t0)
    }
}

/// Maps a timestamp back onto its sample slot.
pub fn time_to_index(t: f64, sample_rate: f64, t0: f64, len: usize) -> Result<usize> {
    let pos = ((t - t0) * sample_rate).round();
    if !pos.is_finite() || pos < 0.0 || pos >= len as f64 {
        return Err(CodecError::InvalidSignal(format!("timestamp {t} lies outside the {len}-sample grid")));
    }
    Ok(pos as usize)
}

pub fn dense_to_events(train: &SpikeTrain) -> Vec<SpikeEvent> {
    train.to_events()
}

pub fn events_to_dense(events: &[SpikeEvent], len: usize, sample_rate: f64, t0: f64) -> Result<SpikeTrain> {
    SpikeTrain::from_events(events, len, sample_rate, t0)
}

/// Binary population spikes indexed `[timestep][sub-timestep][neuron]`.
///
/// Position coding uses a single sub-timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpikes {
    data: Vec<u8>,
    timesteps: usize,
    subtimes: usize,
    neurons: usize,
    sample_rate: f64,
    t0: f64,
}

impl PopulationSpikes {
    pub fn zeros(timesteps: usize, subtimes: usize, neurons: usize, sample_rate: f64, t0: f64) -> Self {
        Self { data: vec![0; timesteps * subtimes * neurons], timesteps, subtimes, neurons, sample_rate, t0 }
    }

    fn offset(&self, t: usize, sub: usize, neuron: usize) -> usize {
        assert!(t < self.timesteps && sub < self.subtimes && neuron < self.neurons);
        (t * self.subtimes + sub) * self.neurons + neuron
    }

    pub fn get(&self, t: usize, sub: usize, neuron: usize) -> bool {
        self.data[self.offset(t, sub, neuron)] != 0
    }

    pub fn set(&mut self, t: usize, sub: usize, neuron: usize) {
        let o = self.offset(t, sub, neuron);
        self.data[o] = 1;
    }

    pub fn timesteps(&self) -> usize {
        self.timesteps
    }

    pub fn subtimes(&self) -> usize {
        self.subtimes
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// `(sub-timestep, neuron)` pairs that fired at timestep `t`, ordered by
    /// sub-timestep then neuron.
    pub fn spikes_at(&self, t: usize) -> Vec<(usize, usize)> {
        let base = t * self.subtimes * self.neurons;
        self.data[base..base + self.subtimes * self.neurons]
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(k, _)| (k / self.neurons, k % self.neurons))
            .collect()
    }

    pub fn fired_at(&self, t: usize) -> bool {
        let base = t * self.subtimes * self.neurons;
        self.data[base..base + self.subtimes * self.neurons].iter().any(|&v| v != 0)
    }

    pub fn spike_count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }
}

/// Finite impulse response filter coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FirFilter(Vec<f64>);

impl FirFilter {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(CodecError::OutOfRange { name: "filter", reason: "no coefficients".into() });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(CodecError::OutOfRange { name: "filter", reason: "non-finite coefficient".into() });
        }
        Ok(Self(coefficients))
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for FirFilter {
    type Error = CodecError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FirFilter> for Vec<f64> {
    fn from(f: FirFilter) -> Self {
        f.0
    }
}

/// The eight coding schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Tbr,
    Sf,
    Mw,
    Bsa,
    Hsa,
    Thsa,
    Grf,
    Position,
}

impl Scheme {
    pub const ALL: [Scheme; 8] =
        [Scheme::Tbr, Scheme::Mw, Scheme::Sf, Scheme::Bsa, Scheme::Hsa, Scheme::Thsa, Scheme::Grf, Scheme::Position];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Tbr => "tbr",
            Scheme::Sf => "sf",
            Scheme::Mw => "mw",
            Scheme::Bsa => "bsa",
            Scheme::Hsa => "hsa",
            Scheme::Thsa => "thsa",
            Scheme::Grf => "grf",
            Scheme::Position => "position",
        }
    }

    /// Column label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Tbr => "TBR",
            Scheme::Sf => "SF",
            Scheme::Mw => "MW",
            Scheme::Bsa => "BSA",
            Scheme::Hsa => "HSA",
            Scheme::Thsa => "T-HSA",
            Scheme::Grf => "GRF",
            Scheme::Position => "Position",
        }
    }

    pub fn is_population(self) -> bool {
        matches!(self, Scheme::Grf | Scheme::Position)
    }

    /// Parameter fields this scheme requires; every other field must be unset.
    pub fn required_fields(self) -> &'static [ParamField] {
        use ParamField::*;
        match self {
            Scheme::Tbr => &[Factor],
            Scheme::Mw => &[Threshold, Window],
            Scheme::Sf => &[Threshold],
            Scheme::Bsa => &[Threshold, Filter],
            Scheme::Hsa => &[Filter],
            Scheme::Thsa => &[Threshold, Filter],
            Scheme::Grf => &[Neurons, Subtimes],
            Scheme::Position => &[Distribution],
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tbr" => Ok(Scheme::Tbr),
            "sf" => Ok(Scheme::Sf),
            "mw" => Ok(Scheme::Mw),
            "bsa" => Ok(Scheme::Bsa),
            "hsa" => Ok(Scheme::Hsa),
            "thsa" | "t-hsa" => Ok(Scheme::Thsa),
            "grf" => Ok(Scheme::Grf),
            "position" | "pos" => Ok(Scheme::Position),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamField {
    Factor,
    Threshold,
    Window,
    Filter,
    Neurons,
    Subtimes,
    Distribution,
}

impl ParamField {
    pub const ALL: [ParamField; 7] = [
        ParamField::Factor,
        ParamField::Threshold,
        ParamField::Window,
        ParamField::Filter,
        ParamField::Neurons,
        ParamField::Subtimes,
        ParamField::Distribution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamField::Factor => "factor",
            ParamField::Threshold => "threshold",
            ParamField::Window => "window",
            ParamField::Filter => "filter",
            ParamField::Neurons => "neurons",
            ParamField::Subtimes => "subtimes",
            ParamField::Distribution => "distribution",
        }
    }
}

/// Parameter bundle for one scheme. Only the fields the scheme needs are set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodecParams {
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FirFilter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neurons: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtimes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<f64>>,
}

impl CodecParams {
    pub fn empty(scheme: Scheme) -> Self {
        Self {
            scheme,
            factor: None,
            threshold: None,
            window: None,
            filter: None,
            neurons: None,
            subtimes: None,
            distribution: None,
        }
    }

    pub fn tbr(factor: f64) -> Self {
        Self { factor: Some(factor), ..Self::empty(Scheme::Tbr) }
    }

    pub fn sf(threshold: f64) -> Self {
        Self { threshold: Some(threshold), ..Self::empty(Scheme::Sf) }
    }

    pub fn mw(window: usize, threshold: f64) -> Self {
        Self { window: Some(window), threshold: Some(threshold), ..Self::empty(Scheme::Mw) }
    }

    pub fn hsa(filter: FirFilter) -> Self {
        Self { filter: Some(filter), ..Self::empty(Scheme::Hsa) }
    }

    pub fn thsa(filter: FirFilter, threshold: f64) -> Self {
        Self { filter: Some(filter), threshold: Some(threshold), ..Self::empty(Scheme::Thsa) }
    }

    pub fn bsa(filter: FirFilter, threshold: f64) -> Self {
        Self { filter: Some(filter), threshold: Some(threshold), ..Self::empty(Scheme::Bsa) }
    }

    pub fn grf(neurons: usize, subtimes: usize) -> Self {
        Self { neurons: Some(neurons), subtimes: Some(subtimes), ..Self::empty(Scheme::Grf) }
    }

    pub fn position(distribution: Vec<f64>) -> Self {
        Self { distribution: Some(distribution), ..Self::empty(Scheme::Position) }
    }

    pub fn has(&self, field: ParamField) -> bool {
        match field {
            ParamField::Factor => self.factor.is_some(),
            ParamField::Threshold => self.threshold.is_some(),
            ParamField::Window => self.window.is_some(),
            ParamField::Filter => self.filter.is_some(),
            ParamField::Neurons => self.neurons.is_some(),
            ParamField::Subtimes => self.subtimes.is_some(),
            ParamField::Distribution => self.distribution.is_some(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(self)
    }
}

/// Accepts `params` iff exactly the fields its scheme requires are present
/// and each is within range.
pub fn validate_params(params: &CodecParams) -> Result<()> {
    let required = params.scheme.required_fields();
    for field in ParamField::ALL {
        match (required.contains(&field), params.has(field)) {
            (true, false) => return Err(CodecError::MissingParameter(field.name())),
            (false, true) => return Err(CodecError::UnexpectedParameter(field.name())),
            _ => {}
        }
    }
    if let Some(f) = params.factor {
        if !f.is_finite() {
            return Err(out_of_range("factor", "must be finite"));
        }
    }
    if let Some(t) = params.threshold {
        let strict = matches!(params.scheme, Scheme::Sf | Scheme::Mw);
        if t.is_nan() || t < 0.0 || (strict && t <= 0.0) || (strict && t.is_infinite()) {
            let bound = if strict { "> 0" } else { ">= 0" };
            return Err(out_of_range("threshold", &format!("{t} must be {bound}")));
        }
    }
    if params.window == Some(0) {
        return Err(out_of_range("window", "must be >= 1"));
    }
    if let Some(m) = params.neurons {
        if m < 3 {
            return Err(out_of_range("neurons", &format!("{m} < 3 leaves the receptive-field width undefined")));
        }
    }
    if let Some(n) = params.subtimes {
        if n < 2 {
            return Err(out_of_range("subtimes", &format!("{n} < 2")));
        }
    }
    if let Some(d) = &params.distribution {
        if d.is_empty() || d.iter().any(|v| !v.is_finite()) {
            return Err(CodecError::EmptyDistribution);
        }
    }
    Ok(())
}

fn out_of_range(name: &'static str, reason: &str) -> CodecError {
    CodecError::OutOfRange { name, reason: reason.to_string() }
}
