//! Population coders: position coding (nearest tuned neuron) and Gaussian
//! receptive fields with sub-timestep latency.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CodecError, Result};
use crate::seed::mix;
use crate::types::{PopulationSpikes, Signal};

/// Index of the distribution value nearest to `x`; ties go to the lowest index.
pub fn nearest_neuron(x: f64, distribution: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &v) in distribution.iter().enumerate() {
        let d = (x - v).abs();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// `m` evenly spaced values covering `[min, max]`.
pub fn linear_distribution(min: f64, max: f64, m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![(min + max) / 2.0],
        _ => (0..m).map(|i| min + (max - min) * i as f64 / (m - 1) as f64).collect(),
    }
}

fn check_distribution(distribution: &[f64]) -> Result<()> {
    if distribution.is_empty() || distribution.iter().any(|v| !v.is_finite()) {
        return Err(CodecError::EmptyDistribution);
    }
    Ok(())
}

pub fn position_encode(signal: &Signal, distribution: &[f64]) -> Result<PopulationSpikes> {
    let x = signal.require_mono()?;
    check_distribution(distribution)?;
    let mut spikes = PopulationSpikes::zeros(x.len(), 1, distribution.len(), signal.sample_rate(), signal.t0());
    for (t, &v) in x.iter().enumerate() {
        spikes.set(t, 0, nearest_neuron(v, distribution));
    }
    Ok(spikes)
}

pub fn position_decode(spikes: &PopulationSpikes, distribution: &[f64]) -> Result<Signal> {
    check_distribution(distribution)?;
    if spikes.neurons() != distribution.len() {
        return Err(CodecError::LengthMismatch { left: spikes.neurons(), right: distribution.len() });
    }
    let out = (0..spikes.timesteps())
        .map(|t| match spikes.spikes_at(t).as_slice() {
            [(_, neuron)] => Ok(distribution[*neuron]),
            other => Err(CodecError::MalformedSpikes {
                timestep: t,
                reason: format!("expected exactly one spike, found {}", other.len()),
            }),
        })
        .collect::<Result<Vec<f64>>>()?;
    Signal::with_layout(out, spikes.sample_rate(), spikes.t0(), 1)
}

/// Receptive-field layout for `m` neurons over `[min_sig, max_sig]` and the
/// `n + 1` response levels used to pick spike latency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrfParams {
    pub m: usize,
    pub n: usize,
    pub min_sig: f64,
    pub max_sig: f64,
}

impl GrfParams {
    pub fn new(m: usize, n: usize, min_sig: f64, max_sig: f64) -> Result<Self> {
        if m < 3 {
            return Err(CodecError::OutOfRange { name: "neurons", reason: format!("{m} < 3") });
        }
        if n < 2 {
            return Err(CodecError::OutOfRange { name: "subtimes", reason: format!("{n} < 2") });
        }
        if !(min_sig.is_finite() && max_sig.is_finite()) {
            return Err(CodecError::InvalidSignal("non-finite receptive-field bounds".into()));
        }
        if max_sig <= min_sig {
            return Err(CodecError::ConstantSignal);
        }
        Ok(Self { m, n, min_sig, max_sig })
    }

    /// Shared field width `(max - min) / (m - 2)`.
    pub fn sigma(&self) -> f64 {
        (self.max_sig - self.min_sig) / (self.m - 2) as f64
    }

    /// Centre of neuron `i` (0-based): `min + (2i + 1) / 2 * sigma`.
    ///
    /// The last centres fall past `max_sig`; the layout is kept as is.
    pub fn center(&self, i: usize) -> f64 {
        self.min_sig + (2.0 * i as f64 + 1.0) / 2.0 * self.sigma()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.center(i)).collect()
    }

    /// Peak of the normal density, reached at a neuron's centre.
    pub fn peak(&self) -> f64 {
        normal_pdf(0.0, 0.0, self.sigma())
    }

    /// `n + 1` evenly spaced levels from 0 to the peak response.
    pub fn timing_levels(&self) -> Vec<f64> {
        let peak = self.peak();
        (0..=self.n).map(|k| peak * k as f64 / self.n as f64).collect()
    }

    pub fn response(&self, x: f64, neuron: usize) -> f64 {
        normal_pdf(x, self.center(neuron), self.sigma())
    }

    /// Sub-timestep at which `neuron` fires for sample `x`, or `None` when its
    /// response rounds to the zero level. The peak level maps to sub-timestep 0.
    pub fn spike_time(&self, x: f64, neuron: usize, levels: &[f64]) -> Option<usize> {
        let level = nearest_neuron(self.response(x, neuron), levels);
        (level > 0).then(|| self.n - level)
    }
}

pub fn normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// How GRF activations become spikes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GrfMode {
    /// Stronger responses fire at earlier sub-timesteps.
    #[default]
    Latency,
    /// Each neuron fires at sub-timestep 0 with probability `response / peak`.
    /// Draws come from a generator keyed by `(seed, timestep)`.
    Probabilistic { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrfEncodeResult {
    pub spikes: PopulationSpikes,
    pub params: GrfParams,
}

impl GrfEncodeResult {
    pub fn min_sig(&self) -> f64 {
        self.params.min_sig
    }

    pub fn max_sig(&self) -> f64 {
        self.params.max_sig
    }
}

/// GRF encoding with bounds taken from the signal itself.
pub fn grf_encode(signal: &Signal, m: usize, n: usize) -> Result<GrfEncodeResult> {
    grf_encode_mode(signal, m, n, GrfMode::Latency)
}

pub fn grf_encode_mode(signal: &Signal, m: usize, n: usize, mode: GrfMode) -> Result<GrfEncodeResult> {
    signal.require_mono()?;
    let params = GrfParams::new(m, n, signal.min(), signal.max())?;
    grf_encode_with_params(signal, params, mode)
}

/// GRF encoding against fixed receptive fields (streaming and caller-bounded use).
pub fn grf_encode_with_params(signal: &Signal, params: GrfParams, mode: GrfMode) -> Result<GrfEncodeResult> {
    let x = signal.require_mono()?;
    let mut stream = GrfStream::new(params, mode);
    let mut spikes = PopulationSpikes::zeros(x.len(), params.n, params.m, signal.sample_rate(), signal.t0());
    for (t, &v) in x.iter().enumerate() {
        for (sub, neuron) in stream.push(v) {
            spikes.set(t, sub, neuron);
        }
    }
    Ok(GrfEncodeResult { spikes, params })
}

/// Per-sample GRF encoder.
#[derive(Debug, Clone)]
pub struct GrfStream {
    params: GrfParams,
    levels: Vec<f64>,
    mode: GrfMode,
    t: u64,
}

impl GrfStream {
    pub fn new(params: GrfParams, mode: GrfMode) -> Self {
        Self { levels: params.timing_levels(), params, mode, t: 0 }
    }

    /// `(sub-timestep, neuron)` pairs for the next sample, sorted by
    /// sub-timestep then neuron.
    pub fn push(&mut self, x: f64) -> Vec<(usize, usize)> {
        let p = &self.params;
        let mut out: Vec<(usize, usize)> = match self.mode {
            GrfMode::Latency => (0..p.m).filter_map(|i| p.spike_time(x, i, &self.levels).map(|s| (s, i))).collect(),
            GrfMode::Probabilistic { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, self.t));
                let peak = p.peak();
                (0..p.m).filter(|&i| rng.random::<f64>() < p.response(x, i) / peak).map(|i| (0, i)).collect()
            }
        };
        self.t += 1;
        out.sort_unstable();
        out
    }
}

/// Response-weighted mean of the firing neurons' centres, weighting each by
/// the level implied by its sub-timestep. Silent timesteps repeat the previous
/// estimate (the range midpoint before the first spike).
pub fn grf_decode(spikes: &PopulationSpikes, params: &GrfParams) -> Result<Signal> {
    if spikes.neurons() != params.m || spikes.subtimes() != params.n {
        return Err(CodecError::MalformedSpikes {
            timestep: 0,
            reason: format!(
                "cube has {} neurons x {} sub-timesteps, parameters expect {} x {}",
                spikes.neurons(),
                spikes.subtimes(),
                params.m,
                params.n
            ),
        });
    }
    let mut held = (params.min_sig + params.max_sig) / 2.0;
    let out = (0..spikes.timesteps())
        .map(|t| {
            let (num, den) = spikes.spikes_at(t).into_iter().fold((0.0, 0.0), |(num, den), (sub, i)| {
                let w = (params.n - sub) as f64;
                (num + w * params.center(i), den + w)
            });
            if den > 0.0 {
                held = num / den;
            }
            held
        })
        .collect();
    Signal::with_layout(out, spikes.sample_rate(), spikes.t0(), 1)
}

/// Per-sample position encoder.
#[derive(Debug, Clone)]
pub struct PositionStream {
    distribution: Vec<f64>,
}

impl PositionStream {
    pub fn new(distribution: Vec<f64>) -> Result<Self> {
        check_distribution(&distribution)?;
        Ok(Self { distribution })
    }

    pub fn push(&mut self, x: f64) -> usize {
        nearest_neuron(x, &self.distribution)
    }
}
