//! FIR-filter rate coders: Hough spike (HSA), threshold Hough spike (T-HSA)
//! and Ben's spiker (BSA), plus the shared convolution decoder.
//!
//! Every encoder works on a private copy of the input shifted by its minimum.
//! The window examined at position `i` covers samples `i..i + F` and only
//! positions with a complete window (`i + F <= L`) may spike.

use serde::{Deserialize, Serialize};

use crate::error::{CodecError, Result};
use crate::types::{FirFilter, Signal, SpikeTrain};

/// Unipolar spike train plus the removed offset.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEncodeResult {
    pub train: SpikeTrain,
    /// Minimum of the original signal.
    pub shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Gaussian,
    Triangular,
    Boxcar,
}

impl std::str::FromStr for FilterKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(FilterKind::Gaussian),
            "triangular" => Ok(FilterKind::Triangular),
            "boxcar" => Ok(FilterKind::Boxcar),
            other => Err(format!("unknown filter kind `{other}`")),
        }
    }
}

/// Recipe for a filter; rate-coder configs store this rather than raw taps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub length: usize,
    pub scale: f64,
}

impl FilterSpec {
    pub fn build(&self) -> Result<FirFilter> {
        make_fir_filter(self.kind, self.length, self.scale)
    }
}

/// Builds a non-negative filter whose peak coefficient equals `scale`.
///
/// * boxcar: every coefficient is `scale`
/// * triangular: `scale * (1 - |k - c| / (c + 1))` with `c = (length - 1) / 2`
/// * gaussian: `scale * exp(-(k - c)^2 / (2 s^2))` with `s = (length - 1) / 4`,
///   so the end taps sit two standard deviations from the centre
pub fn make_fir_filter(kind: FilterKind, length: usize, scale: f64) -> Result<FirFilter> {
    if length == 0 {
        return Err(CodecError::OutOfRange { name: "filter_len", reason: "must be >= 1".into() });
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CodecError::OutOfRange { name: "filter_scale", reason: format!("{scale} must be > 0") });
    }
    let c = (length as f64 - 1.0) / 2.0;
    let coefficients = (0..length)
        .map(|k| {
            let d = k as f64 - c;
            match kind {
                FilterKind::Boxcar => scale,
                FilterKind::Triangular => scale * (1.0 - d.abs() / (c + 1.0)),
                FilterKind::Gaussian if length == 1 => scale,
                FilterKind::Gaussian => {
                    let s = (length as f64 - 1.0) / 4.0;
                    scale * (-(d * d) / (2.0 * s * s)).exp()
                }
            }
        })
        .collect();
    FirFilter::new(coefficients)
}

/// Default filter for a signal: gaussian, `ceil(sample_rate / 10)` taps
/// rounded up to odd, scaled so the taps sum to the signal's standard
/// deviation.
pub fn default_filter_spec(signal: &Signal) -> FilterSpec {
    let mut length = (signal.sample_rate() / 10.0).ceil().max(1.0) as usize;
    if length.is_multiple_of(2) {
        length += 1;
    }
    let x = signal.samples();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let std = if x.len() > 1 { (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    let unit = make_fir_filter(FilterKind::Gaussian, length, 1.0).expect("valid unit filter");
    let scale = if std > 0.0 { std / unit.sum() } else { 1.0 };
    FilterSpec { kind: FilterKind::Gaussian, length, scale }
}

fn prepare(signal: &Signal, filter: &FirFilter) -> Result<(Vec<f64>, f64)> {
    let x = signal.require_mono()?;
    if filter.len() >= x.len() {
        return Err(CodecError::FilterTooLong { filter: filter.len(), signal: x.len() });
    }
    let shift = signal.min();
    Ok((x.iter().map(|v| v - shift).collect(), shift))
}

fn subtract(work: &mut [f64], at: usize, filter: &[f64]) {
    for (w, f) in work[at..at + filter.len()].iter_mut().zip(filter) {
        *w -= f;
    }
}

/// Greedy rate encoding: spike at `i` whenever `accept(window, filter)` holds,
/// then subtract the filter from the window.
fn greedy<F>(signal: &Signal, filter: &FirFilter, mut accept: F) -> Result<RateEncodeResult>
where
    F: FnMut(&[f64], &[f64]) -> bool,
{
    let (mut work, shift) = prepare(signal, filter)?;
    let taps = filter.coefficients();
    let mut train = SpikeTrain::zeros_like(signal);
    let p = train.polarities_mut();
    for i in 0..=work.len() - taps.len() {
        if accept(&work[i..i + taps.len()], taps) {
            p[i] = 1;
            subtract(&mut work, i, taps);
        }
    }
    Ok(RateEncodeResult { train, shift })
}

/// Spikes where the shifted signal dominates the filter tap-for-tap.
pub fn hsa_encode(signal: &Signal, filter: &FirFilter) -> Result<RateEncodeResult> {
    greedy(signal, filter, |w, f| w.iter().zip(f).all(|(x, c)| x >= c))
}

/// Spikes where the total shortfall `sum(max(0, filter - window))` is at
/// most `threshold`.
pub fn thsa_encode(signal: &Signal, filter: &FirFilter, threshold: f64) -> Result<RateEncodeResult> {
    check_threshold(threshold)?;
    greedy(signal, filter, |w, f| {
        let shortfall: f64 = w.iter().zip(f).map(|(x, c)| (c - x).max(0.0)).sum();
        shortfall <= threshold
    })
}

/// Spikes where `sum|window - filter| <= threshold * sum|window|`.
pub fn bsa_encode(signal: &Signal, filter: &FirFilter, threshold: f64) -> Result<RateEncodeResult> {
    check_threshold(threshold)?;
    greedy(signal, filter, |w, f| {
        let mismatch: f64 = w.iter().zip(f).map(|(x, c)| (x - c).abs()).sum();
        let mass: f64 = w.iter().map(|x| x.abs()).sum();
        mismatch <= mass * threshold
    })
}

pub const BSA_DEFAULT_THRESHOLD: f64 = 0.88;

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(CodecError::OutOfRange { name: "threshold", reason: format!("{threshold} must be >= 0") });
    }
    Ok(())
}

/// Convolves the train with `filter`, truncated to the train length, and adds
/// back the shift.
pub fn rate_decode(result: &RateEncodeResult, filter: &FirFilter) -> Signal {
    let p = result.train.polarities();
    let taps = filter.coefficients();
    let mut out = vec![result.shift; p.len()];
    for (i, _) in p.iter().enumerate().filter(|(_, &s)| s != 0) {
        let s = f64::from(p[i]);
        for (o, f) in out[i..].iter_mut().zip(taps) {
            *o += s * f;
        }
    }
    Signal::with_layout(out, result.train.sample_rate(), result.train.t0(), 1).expect("finite reconstruction")
}
