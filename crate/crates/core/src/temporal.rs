//! Temporal-contrast coders: threshold-based representation (TBR),
//! step-forward (SF) and moving-window (MW).
//!
//! All three emit bipolar trains and are decoded by accumulating
//! `polarity * threshold` from an anchor value (`init`).

use std::collections::VecDeque;

use crate::error::{CodecError, Result};
use crate::types::{Signal, SpikeTrain};

/// Spike train plus what a temporal decoder needs to rebuild the signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalEncodeResult {
    pub train: SpikeTrain,
    /// TBR: derived from the difference statistics. SF/MW: the input threshold.
    pub threshold: f64,
    /// First sample of the encoded signal.
    pub init: f64,
}

/// `mean(diff) + factor * std(diff)` over first differences, clamped at 0.
///
/// `std` uses the n-1 denominator; a single difference has zero spread.
pub fn tbr_threshold(samples: &[f64], factor: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(CodecError::SignalTooShort { needed: 2, got: samples.len() });
    }
    let diffs: Vec<f64> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let std =
        if diffs.len() > 1 { (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    Ok((mean + factor * std).max(0.0))
}

fn contrast(delta: f64, threshold: f64) -> i8 {
    if delta > threshold {
        1
    } else if delta < -threshold {
        -1
    } else {
        0
    }
}

pub fn tbr_encode(signal: &Signal, factor: f64) -> Result<TemporalEncodeResult> {
    let threshold = tbr_threshold(signal.require_mono()?, factor)?;
    tbr_encode_with_threshold(signal, threshold)
}

/// TBR with a caller-supplied threshold (streaming / calibrated use).
///
/// Timestamp 0 reuses the first difference, so every timestamp gets a slot.
pub fn tbr_encode_with_threshold(signal: &Signal, threshold: f64) -> Result<TemporalEncodeResult> {
    let x = signal.require_mono()?;
    if x.len() < 2 {
        return Err(CodecError::SignalTooShort { needed: 2, got: x.len() });
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(CodecError::OutOfRange { name: "threshold", reason: format!("{threshold} must be >= 0") });
    }
    let mut train = SpikeTrain::zeros_like(signal);
    let p = train.polarities_mut();
    p[0] = contrast(x[1] - x[0], threshold);
    for i in 1..x.len() {
        p[i] = contrast(x[i] - x[i - 1], threshold);
    }
    Ok(TemporalEncodeResult { train, threshold, init: x[0] })
}

/// `out[0] = init`, then `out[i] = out[i-1] + polarity[i] * threshold`.
pub fn tbr_decode(result: &TemporalEncodeResult) -> Signal {
    let mut level: i64 = 0;
    let out = result
        .train
        .polarities()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if i > 0 {
                level += i64::from(p);
            }
            result.init + result.threshold * level as f64
        })
        .collect();
    accumulated_signal(out, &result.train)
}

pub fn sf_encode(signal: &Signal, threshold: f64) -> Result<TemporalEncodeResult> {
    let x = signal.require_mono()?;
    let mut stream = SfStream::new(threshold)?;
    let mut train = SpikeTrain::zeros_like(signal);
    for (slot, &v) in train.polarities_mut().iter_mut().zip(x) {
        *slot = stream.push(v);
    }
    Ok(TemporalEncodeResult { train, threshold, init: x[0] })
}

/// `out[i] = init + threshold * sum(polarity[0..=i])`.
pub fn sf_decode(result: &TemporalEncodeResult) -> Signal {
    let mut level: i64 = 0;
    let out = result
        .train
        .polarities()
        .iter()
        .map(|&p| {
            level += i64::from(p);
            result.init + result.threshold * level as f64
        })
        .collect();
    accumulated_signal(out, &result.train)
}

/// Moving-window encoding. The first `window + 1` samples are compared with
/// their own mean; from index `window + 1` on the baseline is the mean of the
/// `window + 1` samples strictly before the current one.
pub fn mw_encode(signal: &Signal, window: usize, threshold: f64) -> Result<TemporalEncodeResult> {
    let x = signal.require_mono()?;
    if window == 0 {
        return Err(CodecError::OutOfRange { name: "window", reason: "must be >= 1".into() });
    }
    if x.len() <= window + 1 {
        return Err(CodecError::SignalTooShort { needed: window + 2, got: x.len() });
    }
    let mut stream = MwStream::new(window, threshold)?;
    let mut p = Vec::with_capacity(x.len());
    for &v in x {
        p.extend(stream.push(v));
    }
    debug_assert_eq!(p.len(), x.len());
    let train = SpikeTrain::from_parts(p, signal.sample_rate(), signal.t0());
    Ok(TemporalEncodeResult { train, threshold, init: x[0] })
}

pub fn mw_decode(result: &TemporalEncodeResult) -> Signal {
    sf_decode(result)
}

fn accumulated_signal(samples: Vec<f64>, train: &SpikeTrain) -> Signal {
    Signal::with_layout(samples, train.sample_rate(), train.t0(), 1).expect("decoded samples stay finite")
}

fn check_positive(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold.is_finite() {
        Ok(())
    } else {
        Err(CodecError::NonPositiveThreshold(threshold))
    }
}

/// Step-forward encoder state for sample-by-sample use.
#[derive(Debug, Clone)]
pub struct SfStream {
    threshold: f64,
    base: Option<f64>,
}

impl SfStream {
    pub fn new(threshold: f64) -> Result<Self> {
        check_positive(threshold)?;
        Ok(Self { threshold, base: None })
    }

    /// Polarity for the sample just pushed. The first sample only sets the
    /// baseline.
    pub fn push(&mut self, sample: f64) -> i8 {
        let Some(base) = self.base.as_mut() else {
            self.base = Some(sample);
            return 0;
        };
        if sample > *base + self.threshold {
            *base += self.threshold;
            1
        } else if sample < *base - self.threshold {
            *base -= self.threshold;
            -1
        } else {
            0
        }
    }
}

/// Moving-window encoder state. The first `window + 1` polarities are
/// released together once enough samples exist to form the initial mean.
#[derive(Debug, Clone)]
pub struct MwStream {
    window: usize,
    threshold: f64,
    history: VecDeque<f64>,
    primed: bool,
}

impl MwStream {
    pub fn new(window: usize, threshold: f64) -> Result<Self> {
        check_positive(threshold)?;
        if window == 0 {
            return Err(CodecError::OutOfRange { name: "window", reason: "must be >= 1".into() });
        }
        Ok(Self { window, threshold, history: VecDeque::with_capacity(window + 1), primed: false })
    }

    fn baseline(&self) -> f64 {
        self.history.iter().sum::<f64>() / self.history.len() as f64
    }

    pub fn push(&mut self, sample: f64) -> Vec<i8> {
        let span = self.window + 1;
        if !self.primed {
            self.history.push_back(sample);
            if self.history.len() < span {
                return Vec::new();
            }
            self.primed = true;
            let base = self.baseline();
            return self.history.iter().map(|&v| contrast(v - base, self.threshold)).collect();
        }
        let base = self.baseline();
        self.history.pop_front();
        self.history.push_back(sample);
        vec![contrast(sample - base, self.threshold)]
    }
}

/// TBR encoder state. The threshold is either fixed up front or computed from
/// a calibration prefix; polarities for buffered samples are released once it
/// is known.
#[derive(Debug, Clone)]
pub struct TbrStream {
    mode: TbrThreshold,
    threshold: Option<f64>,
    pending: Vec<f64>,
    last: Option<f64>,
    emitted: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TbrThreshold {
    Fixed(f64),
    /// Compute `mean + factor * std` of the differences over the first `len`
    /// samples.
    Calibrate {
        factor: f64,
        len: usize,
    },
}

impl TbrStream {
    pub fn new(mode: TbrThreshold) -> Result<Self> {
        let threshold = match mode {
            TbrThreshold::Fixed(t) if t.is_nan() || t < 0.0 => {
                return Err(CodecError::OutOfRange { name: "threshold", reason: format!("{t} must be >= 0") })
            }
            TbrThreshold::Fixed(t) => Some(t),
            TbrThreshold::Calibrate { len, .. } if len < 2 => {
                return Err(CodecError::OutOfRange { name: "calibration", reason: "needs at least 2 samples".into() })
            }
            TbrThreshold::Calibrate { factor, .. } if !factor.is_finite() => {
                return Err(CodecError::OutOfRange { name: "factor", reason: "must be finite".into() })
            }
            TbrThreshold::Calibrate { .. } => None,
        };
        Ok(Self { mode, threshold, pending: Vec::new(), last: None, emitted: 0 })
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn push(&mut self, sample: f64) -> Vec<i8> {
        match self.threshold {
            Some(t) if self.emitted > 0 => {
                let prev = self.last.replace(sample).expect("previous sample");
                self.emitted += 1;
                vec![contrast(sample - prev, t)]
            }
            _ => {
                self.pending.push(sample);
                self.last = Some(sample);
                let ready = match self.mode {
                    TbrThreshold::Fixed(_) => self.pending.len() >= 2,
                    TbrThreshold::Calibrate { factor, len } => {
                        if self.pending.len() >= len {
                            self.threshold = Some(tbr_threshold(&self.pending, factor).expect("len >= 2"));
                            true
                        } else {
                            false
                        }
                    }
                };
                if !ready {
                    return Vec::new();
                }
                let t = self.threshold.expect("threshold known");
                let x = std::mem::take(&mut self.pending);
                let mut out = Vec::with_capacity(x.len());
                out.push(contrast(x[1] - x[0], t));
                out.extend(x.windows(2).map(|w| contrast(w[1] - w[0], t)));
                self.emitted = out.len();
                out
            }
        }
    }

    /// Releases samples still waiting for a threshold at end of input. A
    /// calibration prefix cut short is calibrated on what arrived.
    pub fn finish(&mut self) -> Vec<i8> {
        if self.emitted > 0 || self.pending.is_empty() {
            return Vec::new();
        }
        let x = std::mem::take(&mut self.pending);
        if x.len() < 2 {
            self.emitted = x.len();
            return vec![0; x.len()];
        }
        let t = match self.mode {
            TbrThreshold::Fixed(t) => t,
            TbrThreshold::Calibrate { factor, .. } => tbr_threshold(&x, factor).expect("len >= 2"),
        };
        self.threshold = Some(t);
        let mut out = vec![contrast(x[1] - x[0], t)];
        out.extend(x.windows(2).map(|w| contrast(w[1] - w[0], t)));
        self.emitted = out.len();
        out
    }
}
