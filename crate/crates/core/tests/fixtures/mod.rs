//! Hand-traced fixtures checked twice: once against a naive, loop-by-loop
//! transcription of each algorithm (the oracle below) and once against the
//! library. The oracle never calls into the crate. Each fixture panics on
//! mismatch; `ALL` lists them for the test targets that run them.

use spikecodec::lab::{drift_profile, rmse, spiking_efficiency};
use spikecodec::population::{grf_decode, grf_encode, grf_encode_with_params, position_encode, GrfMode, GrfParams};
use spikecodec::rate::{bsa_encode, hsa_encode, make_fir_filter, rate_decode, thsa_encode, FilterKind};
use spikecodec::temporal::{
    mw_decode, mw_encode, sf_decode, sf_encode, tbr_decode, tbr_encode, SfStream, TemporalEncodeResult,
};
use spikecodec::{CodecError, CodecParams, FirFilter, Scheme, Signal, SpikeTrain};

#[allow(clippy::needless_range_loop)]
pub mod oracle {
    pub fn tbr(x: &[f64], alpha: f64) -> (Vec<i8>, f64) {
        let mut diff = Vec::new();
        for i in 1..x.len() {
            diff.push(x[i] - x[i - 1]);
        }
        let n = diff.len() as f64;
        let mut mean = 0.0;
        for d in &diff {
            mean += d;
        }
        mean /= n;
        let mut var = 0.0;
        for d in &diff {
            var += (d - mean) * (d - mean);
        }
        let std = if diff.len() > 1 { (var / (n - 1.0)).sqrt() } else { 0.0 };
        let threshold = f64::max(mean + alpha * std, 0.0);
        let mut padded = vec![diff[0]];
        padded.extend(&diff);
        let mut p = vec![0; x.len()];
        for i in 0..x.len() {
            if padded[i] > threshold {
                p[i] = 1;
            } else if padded[i] < -threshold {
                p[i] = -1;
            }
        }
        (p, threshold)
    }

    pub fn tbr_decode(p: &[i8], threshold: f64, init: f64) -> Vec<f64> {
        let mut out = vec![init; p.len()];
        for i in 1..p.len() {
            out[i] = out[i - 1] + p[i] as f64 * threshold;
        }
        out
    }

    pub fn sf(x: &[f64], threshold: f64) -> Vec<i8> {
        let mut base = x[0];
        let mut p = vec![0; x.len()];
        for i in 1..x.len() {
            if x[i] > base + threshold {
                p[i] = 1;
                base += threshold;
            } else if x[i] < base - threshold {
                p[i] = -1;
                base -= threshold;
            }
        }
        p
    }

    pub fn cumulative(p: &[i8], threshold: f64, init: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut acc = init;
        for &s in p {
            acc += s as f64 * threshold;
            out.push(acc);
        }
        out
    }

    pub fn mw(x: &[f64], window: usize, threshold: f64) -> Vec<i8> {
        let mut p = vec![0; x.len()];
        for i in 0..x.len() {
            let (lo, hi) = if i <= window { (0, window + 1) } else { (i - window - 1, i) };
            let mut base = 0.0;
            for v in &x[lo..hi] {
                base += v;
            }
            base /= (hi - lo) as f64;
            if x[i] > base + threshold {
                p[i] = 1;
            } else if x[i] < base - threshold {
                p[i] = -1;
            }
        }
        p
    }

    fn shifted(x: &[f64]) -> (Vec<f64>, f64) {
        let mut shift = x[0];
        for &v in x {
            if v < shift {
                shift = v;
            }
        }
        (x.iter().map(|v| v - shift).collect(), shift)
    }

    pub fn hsa(x: &[f64], f: &[f64]) -> (Vec<i8>, f64) {
        let (mut w, shift) = shifted(x);
        let mut p = vec![0; x.len()];
        let mut i = 0;
        while i + f.len() <= w.len() {
            let mut count = 0;
            for j in 0..f.len() {
                if w[i + j] >= f[j] {
                    count += 1;
                }
            }
            if count == f.len() {
                p[i] = 1;
                for j in 0..f.len() {
                    w[i + j] -= f[j];
                }
            }
            i += 1;
        }
        (p, shift)
    }

    pub fn thsa(x: &[f64], f: &[f64], threshold: f64) -> (Vec<i8>, f64) {
        let (mut w, shift) = shifted(x);
        let mut p = vec![0; x.len()];
        let mut i = 0;
        while i + f.len() <= w.len() {
            let mut error = 0.0;
            for j in 0..f.len() {
                if f[j] > w[i + j] {
                    error += f[j] - w[i + j];
                }
            }
            if error <= threshold {
                p[i] = 1;
                for j in 0..f.len() {
                    w[i + j] -= f[j];
                }
            }
            i += 1;
        }
        (p, shift)
    }

    pub fn bsa(x: &[f64], f: &[f64], threshold: f64) -> (Vec<i8>, f64) {
        let (mut w, shift) = shifted(x);
        let mut p = vec![0; x.len()];
        let mut i = 0;
        while i + f.len() <= w.len() {
            let mut err1 = 0.0;
            let mut err2 = 0.0;
            for j in 0..f.len() {
                err1 += (w[i + j] - f[j]).abs();
                err2 += w[i + j].abs();
            }
            if err1 <= err2 * threshold {
                p[i] = 1;
                for j in 0..f.len() {
                    w[i + j] -= f[j];
                }
            }
            i += 1;
        }
        (p, shift)
    }

    pub fn convolve(p: &[i8], f: &[f64], shift: f64) -> Vec<f64> {
        let mut out = vec![shift; p.len()];
        for i in 0..p.len() {
            for j in 0..f.len() {
                if j <= i {
                    out[i] += p[i - j] as f64 * f[j];
                }
            }
        }
        out
    }

    pub fn position(x: &[f64], d: &[f64]) -> Vec<usize> {
        let mut out = Vec::new();
        for &v in x {
            let mut best = 0;
            for k in 1..d.len() {
                if (v - d[k]).abs() < (v - d[best]).abs() {
                    best = k;
                }
            }
            out.push(best);
        }
        out
    }

    /// Centres and width with 1-based neuron numbering:
    /// `mu_i = min + (2(i+1) - 3) / 2 * (max - min) / (m - 2)`.
    pub fn grf_fields(m: usize, min: f64, max: f64) -> (Vec<f64>, f64) {
        let sigma = (max - min) / (m as f64 - 2.0);
        let mut mu = Vec::new();
        for i in 1..=m {
            mu.push(min + (2.0 * (i as f64 + 1.0) - 3.0) / 2.0 * sigma);
        }
        (mu, sigma)
    }

    /// `(sub-timestep, neuron)` pairs for one sample, sorted.
    pub fn grf_sample(x: f64, m: usize, n: usize, min: f64, max: f64) -> Vec<(usize, usize)> {
        let (mu, sigma) = grf_fields(m, min, max);
        let density = |v: f64, c: f64| {
            (-(v - c) * (v - c) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        };
        let peak = density(0.0, 0.0);
        let mut levels = Vec::new();
        for k in 0..=n {
            levels.push(peak * k as f64 / n as f64);
        }
        let mut out = Vec::new();
        for i in 0..m {
            let r = density(x, mu[i]);
            let mut idx = 0;
            for k in 1..levels.len() {
                if (r - levels[k]).abs() < (r - levels[idx]).abs() {
                    idx = k;
                }
            }
            if idx > 0 {
                out.push((n - idx, i));
            }
        }
        out.sort();
        out
    }
}

fn sig(x: &[f64]) -> Signal {
    Signal::new(x.to_vec(), 100.0).unwrap()
}

fn polarities(x: &[i8]) -> Vec<i8> {
    x.to_vec()
}

fn assert_close(a: &[f64], b: &[f64]) {
    assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).abs() < 1e-9, "index {i}: {x} vs {y}");
    }
}

fn result(p: &[i8], threshold: f64, init: f64) -> TemporalEncodeResult {
    TemporalEncodeResult { train: SpikeTrain::new(p.to_vec(), 100.0, 0.0).unwrap(), threshold, init }
}

pub fn tbr_small_ramp() {
    let x = [0.0, 1.0, 1.0, 0.0];
    let (p, thr) = oracle::tbr(&x, 0.0);
    assert_eq!(p, [1, 1, 0, -1]);
    assert_eq!(thr, 0.0);
    let r = tbr_encode(&sig(&x), 0.0).unwrap();
    assert_eq!(r.train.polarities(), p.as_slice());
    assert_eq!(r.threshold, thr);
    assert_eq!(r.init, 0.0);
}

pub fn tbr_decode_accumulates_after_anchor() {
    let p = [1, 1, 0, -1];
    let expected = oracle::tbr_decode(&p, 1.0, 0.0);
    assert_eq!(expected, [0.0, 1.0, 1.0, 0.0]);
    assert_eq!(tbr_decode(&result(&p, 1.0, 0.0)).samples(), expected.as_slice());
}

pub fn tbr_constant_step_is_silent_without_spread() {
    let x: Vec<f64> = (0..20).map(|i| 0.5 * i as f64).collect();
    let (p, thr) = oracle::tbr(&x, 0.0);
    assert_eq!(thr, 0.5);
    assert!(p.iter().all(|&s| s == 0));
    assert_eq!(tbr_encode(&sig(&x), 0.0).unwrap().train.polarities(), p.as_slice());
}

pub fn sf_small_trace() {
    let x = [0.0, 1.0, 0.0, -1.0];
    let p = oracle::sf(&x, 0.5);
    assert_eq!(p, [0, 1, 0, -1]);
    let r = sf_encode(&sig(&x), 0.5).unwrap();
    assert_eq!(r.train.polarities(), p.as_slice());
    assert_eq!(r.init, 0.0);
}

pub fn sf_decode_cumulative_sum() {
    let p = [0, 1, 0, -1];
    let expected = oracle::cumulative(&p, 0.5, 0.0);
    assert_eq!(expected, [0.0, 0.5, 0.5, 0.0]);
    assert_eq!(sf_decode(&result(&p, 0.5, 0.0)).samples(), expected.as_slice());
}

pub fn sf_stream_unit_step() {
    // With strict comparisons, a +1 step against a 0.5 threshold fires once:
    // after the first spike the base sits at 0.5 and 1.0 is not above 1.0.
    let x = [0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
    let expected = oracle::sf(&x, 0.5);
    assert_eq!(expected, [0, 0, 1, 0, 0, 0]);
    let mut s = SfStream::new(0.5).unwrap();
    let got: Vec<i8> = x.iter().map(|&v| s.push(v)).collect();
    assert_eq!(got, expected);

    // A step just above twice the threshold needs two steps to catch up.
    let x = [0.0, 1.2, 1.2, 1.2, 1.2];
    let expected = oracle::sf(&x, 0.5);
    assert_eq!(expected, [0, 1, 1, 0, 0]);
    let mut s = SfStream::new(0.5).unwrap();
    assert_eq!(x.iter().map(|&v| s.push(v)).collect::<Vec<_>>(), expected);
}

pub fn mw_small_trace() {
    let x = [0.0, 1.0, 1.0];
    let p = oracle::mw(&x, 1, 0.4);
    assert_eq!(p, [-1, 1, 1]);
    let r = mw_encode(&sig(&x), 1, 0.4).unwrap();
    assert_eq!(r.train.polarities(), p.as_slice());
}

pub fn mw_decode_cumulative_sum() {
    let p = [-1, 1, 1];
    let expected = oracle::cumulative(&p, 0.4, 0.0);
    let got = mw_decode(&result(&p, 0.4, 0.0));
    assert_close(&expected, &[-0.4, 0.0, 0.4]);
    assert_close(got.samples(), &expected);
}

pub fn temporal_coders_agree_with_oracle_on_longer_signals() {
    let x: Vec<f64> = (0..300).map(|i| (i as f64 * 0.07).sin() * 2.0 + (i as f64 * 0.31).cos() * 0.3).collect();
    let s = sig(&x);
    for alpha in [0.0, 0.5, 1.5] {
        let (p, thr) = oracle::tbr(&x, alpha);
        let r = tbr_encode(&s, alpha).unwrap();
        assert_eq!(r.train.polarities(), p.as_slice());
        assert_eq!(r.threshold, thr);
        assert_close(tbr_decode(&r).samples(), &oracle::tbr_decode(&p, thr, x[0]));
    }
    for thr in [0.05, 0.2, 0.35] {
        let p = oracle::sf(&x, thr);
        let r = sf_encode(&s, thr).unwrap();
        assert_eq!(r.train.polarities(), p.as_slice());
        assert_close(sf_decode(&r).samples(), &oracle::cumulative(&p, thr, x[0]));
    }
    for (w, thr) in [(1, 0.1), (3, 0.2), (7, 0.05)] {
        let p = oracle::mw(&x, w, thr);
        assert_eq!(mw_encode(&s, w, thr).unwrap().train.polarities(), p.as_slice());
    }
}

pub fn gaussian_filter_shape() {
    let f = make_fir_filter(FilterKind::Gaussian, 5, 1.0).unwrap();
    let c = f.coefficients();
    for k in 0..5 {
        assert!((c[k] - c[4 - k]).abs() < 1e-15);
    }
    assert!(c[0] < c[1] && c[1] < c[2]);
    assert_eq!(c[2], 1.0);
    assert!(c.iter().all(|&v| v > 0.0));
}

pub fn hsa_small_trace() {
    let x = [0.0, 2.0, 2.0, 0.0];
    let f = [1.0, 1.0];
    let (p, shift) = oracle::hsa(&x, &f);
    assert_eq!(p, [0, 1, 0, 0]);
    assert_eq!(shift, 0.0);
    let filter = FirFilter::new(f.to_vec()).unwrap();
    let r = hsa_encode(&sig(&x), &filter).unwrap();
    assert_eq!(r.train.polarities(), p.as_slice());
    assert_eq!(r.shift, shift);

    let decoded = rate_decode(&r, &filter);
    assert_eq!(decoded.samples(), oracle::convolve(&p, &f, shift).as_slice());
    let err = rmse(&decoded, &sig(&x)).unwrap();
    assert!((err - 0.5f64.sqrt()).abs() < 1e-12);
}

pub fn thsa_small_trace() {
    let x = [0.0, 2.0, 2.0, 0.0];
    let f = [1.0, 1.0];
    let (p, _) = oracle::thsa(&x, &f, 0.0);
    assert_eq!(p, [0, 1, 0, 0]);
    let filter = FirFilter::new(f.to_vec()).unwrap();
    assert_eq!(thsa_encode(&sig(&x), &filter, 0.0).unwrap().train.polarities(), p.as_slice());
}

pub fn bsa_exact_match_fires() {
    // A window identical to the filter has zero mismatch.
    let x = [2.0, 2.0, 0.0];
    let f = [2.0, 2.0];
    let (p, _) = oracle::bsa(&x, &f, 1.0);
    assert_eq!(p, [1, 0, 0]);
    let filter = FirFilter::new(f.to_vec()).unwrap();
    assert_eq!(bsa_encode(&sig(&x), &filter, 1.0).unwrap().train.polarities(), p.as_slice());
}

pub fn rate_coders_agree_with_oracle_on_longer_signals() {
    let x: Vec<f64> = (0..400).map(|i| (i as f64 * 0.05).sin() * 1.5 + (i as f64 * 0.013).cos()).collect();
    let s = sig(&x);
    for (kind, len, scale) in
        [(FilterKind::Gaussian, 7, 0.4), (FilterKind::Triangular, 5, 0.3), (FilterKind::Boxcar, 3, 0.2)]
    {
        let filter = make_fir_filter(kind, len, scale).unwrap();
        let f = filter.coefficients();
        let (p, shift) = oracle::hsa(&x, f);
        let r = hsa_encode(&s, &filter).unwrap();
        assert_eq!(r.train.polarities(), p.as_slice());
        let ours = rate_decode(&r, &filter);
        for (a, b) in ours.samples().iter().zip(oracle::convolve(&p, f, shift)) {
            assert!((a - b).abs() < 1e-12);
        }
        for thr in [0.0, 0.3, 1.0] {
            assert_eq!(thsa_encode(&s, &filter, thr).unwrap().train.polarities(), oracle::thsa(&x, f, thr).0);
        }
        for thr in [0.5, 0.955, 1.2] {
            assert_eq!(bsa_encode(&s, &filter, thr).unwrap().train.polarities(), oracle::bsa(&x, f, thr).0);
        }
    }
}

pub fn position_nearest_and_tie() {
    let d = [0.0, 0.5, 1.0];
    assert_eq!(oracle::position(&[0.9], &d), [2]);
    let spikes = position_encode(&sig(&[0.9]), &d).unwrap();
    assert_eq!(spikes.spikes_at(0), vec![(0, 2)]);

    let d = [0.0, 0.5];
    assert_eq!(oracle::position(&[0.25], &d), [0]);
    assert_eq!(position_encode(&sig(&[0.25]), &d).unwrap().spikes_at(0), vec![(0, 0)]);
}

pub fn position_efficiency_is_zero() {
    let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
    let spikes = position_encode(&sig(&x), &[-1.0, 0.0, 1.0]).unwrap();
    assert_eq!(spiking_efficiency(&spikes), 0.0);
}

pub fn grf_fields_match_transcription() {
    for (m, min, max) in [(3, 0.0, 1.0), (10, -2.5, 3.3), (20, 1.0, 1.5)] {
        let p = GrfParams::new(m, 4, min, max).unwrap();
        let (mu, sigma) = oracle::grf_fields(m, min, max);
        assert!((p.sigma() - sigma).abs() < 1e-12);
        for (a, b) in p.centers().iter().zip(&mu) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

pub fn grf_sample_matches_transcription() {
    let x: Vec<f64> = (0..200).map(|i| (i as f64 * 0.09).sin() * 2.9).collect();
    let s = sig(&x);
    let (min, max) = (s.min(), s.max());
    for (m, n) in [(3, 2), (10, 8), (20, 10)] {
        let r = grf_encode(&s, m, n).unwrap();
        for (t, &v) in x.iter().enumerate() {
            assert_eq!(r.spikes.spikes_at(t), oracle::grf_sample(v, m, n, min, max), "m={m} n={n} t={t}");
        }
    }
}

pub fn grf_far_sample_is_silent() {
    let params = GrfParams::new(5, 4, 0.0, 1.0).unwrap();
    let far = 50.0;
    assert!(oracle::grf_sample(far, 5, 4, 0.0, 1.0).is_empty());
    let r = grf_encode_with_params(&sig(&[far]), params, GrfMode::Latency).unwrap();
    assert_eq!(r.spikes.spike_count(), 0);
    // Silent timesteps hold the range midpoint until something fires.
    assert_eq!(grf_decode(&r.spikes, &params).unwrap().samples(), &[0.5]);
}

pub fn rmse_fixture() {
    let err = rmse(&sig(&[0.0, 2.0, 2.0, 0.0]), &sig(&[0.0, 1.0, 1.0, 0.0])).unwrap();
    assert!((err - 0.5f64.sqrt()).abs() < 1e-15);
}

pub fn ramp_drift_profile_increases() {
    let a: Vec<f64> = (0..400).map(|i| (i as f64 * 0.1).sin()).collect();
    let b: Vec<f64> = a.iter().enumerate().map(|(i, v)| v + 0.01 * i as f64).collect();
    let profile = drift_profile(&sig(&a), &sig(&b), 50).unwrap();
    // The windowed RMSE of a pure ramp is the root mean square of the ramp over each window.
    for (k, w) in profile.windows.iter().enumerate() {
        let expected = ((50 * k)..(50 * k + 50)).map(|i| (0.01 * i as f64).powi(2)).sum::<f64>() / 50.0;
        assert!((w - expected.sqrt()).abs() < 1e-9);
    }
    assert!(profile.windows.windows(2).all(|w| w[1] > w[0]));
    assert!(profile.slope > 0.0);
}

pub fn params_examples() {
    assert_eq!(CodecParams::sf(0.35).validate(), Ok(()));
    let mw = CodecParams { threshold: Some(0.5), ..CodecParams::empty(Scheme::Mw) };
    assert_eq!(mw.validate(), Err(CodecError::MissingParameter("window")));
}

pub fn dense_sparse_fixture() {
    let p = polarities(&[0, 1, 0, -1, 0]);
    let train = SpikeTrain::new(p.clone(), 10.0, 2.0).unwrap();
    let events = train.to_events();
    assert_eq!(events.len(), 2);
    assert!((events[0].t - 2.1).abs() < 1e-12 && events[0].polarity == 1);
    assert!((events[1].t - 2.3).abs() < 1e-12 && events[1].polarity == -1);
    assert_eq!(SpikeTrain::from_events(&events, 5, 10.0, 2.0).unwrap(), train);
}

pub const ALL: &[(&str, fn())] = &[
    ("tbr_small_ramp", tbr_small_ramp),
    ("tbr_decode_accumulates_after_anchor", tbr_decode_accumulates_after_anchor),
    ("tbr_constant_step_is_silent_without_spread", tbr_constant_step_is_silent_without_spread),
    ("sf_small_trace", sf_small_trace),
    ("sf_decode_cumulative_sum", sf_decode_cumulative_sum),
    ("sf_stream_unit_step", sf_stream_unit_step),
    ("mw_small_trace", mw_small_trace),
    ("mw_decode_cumulative_sum", mw_decode_cumulative_sum),
    ("temporal_coders_agree_with_oracle_on_longer_signals", temporal_coders_agree_with_oracle_on_longer_signals),
    ("gaussian_filter_shape", gaussian_filter_shape),
    ("hsa_small_trace", hsa_small_trace),
    ("thsa_small_trace", thsa_small_trace),
    ("bsa_exact_match_fires", bsa_exact_match_fires),
    ("rate_coders_agree_with_oracle_on_longer_signals", rate_coders_agree_with_oracle_on_longer_signals),
    ("position_nearest_and_tie", position_nearest_and_tie),
    ("position_efficiency_is_zero", position_efficiency_is_zero),
    ("grf_fields_match_transcription", grf_fields_match_transcription),
    ("grf_sample_matches_transcription", grf_sample_matches_transcription),
    ("grf_far_sample_is_silent", grf_far_sample_is_silent),
    ("rmse_fixture", rmse_fixture),
    ("ramp_drift_profile_increases", ramp_drift_profile_increases),
    ("params_examples", params_examples),
    ("dense_sparse_fixture", dense_sparse_fixture),
];
