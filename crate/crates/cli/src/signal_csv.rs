//! Signal files: a `t,value[,channel]` header followed by one row per sample.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use spikecodec::Signal;

use crate::error::{CliError, CliResult};

/// Largest tolerated gap between a row's timestamp and `t0 + i / rate`.
pub const TIME_TOLERANCE: f64 = 1e-9;

/// Parses a signal. The sample rate is `declared_rate` if given, otherwise
/// inferred from the timestamps of channel 0.
pub fn read_signal<R: Read>(input: R, declared_rate: Option<f64>) -> CliResult<Signal> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| CliError::input(format!("signal: {e}")))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let has_channel = match cols.as_slice() {
        ["t", "value"] => false,
        ["t", "value", "channel"] => true,
        [] | [""] => return Err(CliError::input("signal: empty file")),
        _ => return Err(CliError::input(format!("signal: expected header t,value[,channel], got {}", cols.join(",")))),
    };

    let mut channels: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| CliError::input(format!("signal line {line}: {e}")))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let num = |i: usize, what: &str| -> CliResult<f64> {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::input(format!("signal line {line}: bad {what} {:?}", field(i))))
        };
        let t = num(0, "timestamp")?;
        let v = num(1, "value")?;
        let ch = if has_channel {
            field(2).parse::<usize>().map_err(|_| CliError::input(format!("signal line {line}: bad channel")))?
        } else {
            0
        };
        channels.entry(ch).or_default().push((t, v));
    }
    if channels.is_empty() {
        return Err(CliError::input("signal: no samples"));
    }
    if channels.keys().copied().ne(0..channels.len()) {
        return Err(CliError::input("signal: channels must be numbered 0, 1, 2, ... without gaps"));
    }

    let first = &channels[&0];
    let t0 = first[0].0;
    let rate = match declared_rate {
        Some(r) if r.is_finite() && r > 0.0 => r,
        Some(r) => return Err(CliError::usage(format!("sample rate {r} must be > 0"))),
        None if first.len() >= 2 && first[first.len() - 1].0 > t0 => infer_rate(first),
        None => return Err(CliError::input("signal: cannot infer the sample rate, pass --sample-rate")),
    };
    for (ch, rows) in &channels {
        for (i, &(t, _)) in rows.iter().enumerate() {
            let expected = t0 + i as f64 / rate;
            if (t - expected).abs() > TIME_TOLERANCE {
                return Err(CliError::input(format!(
                    "signal: channel {ch} sample {i} at t={t}, expected {expected} for {rate} Hz"
                )));
            }
        }
    }
    let values: Vec<Vec<f64>> = channels.into_values().map(|rows| rows.into_iter().map(|(_, v)| v).collect()).collect();
    Signal::from_channels(values, rate, t0).map_err(|e| CliError::input(format!("signal: {e}")))
}

/// Rate from the full timestamp span, snapped to whole hertz when within
/// one part per million, since printed timestamps rarely divide exactly.
fn infer_rate(rows: &[(f64, f64)]) -> f64 {
    let span = rows[rows.len() - 1].0 - rows[0].0;
    let rate = (rows.len() - 1) as f64 / span;
    let whole = rate.round();
    if whole > 0.0 && (rate - whole).abs() <= 1e-6 * rate {
        whole
    } else {
        rate
    }
}

/// Writes rows in time order; the channel column appears only for
/// multi-channel signals.
pub fn write_signal<W: Write>(out: W, signal: &Signal) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let multi = signal.channels() > 1;
    let io = |e: csv::Error| CliError::input(format!("writing signal: {e}"));
    if multi {
        w.write_record(["t", "value", "channel"]).map_err(io)?;
    } else {
        w.write_record(["t", "value"]).map_err(io)?;
    }
    for i in 0..signal.len() {
        let t = signal.timestamp(i).to_string();
        for c in 0..signal.channels() {
            let v = signal.channel(c)[i].to_string();
            if multi {
                w.write_record([t.as_str(), v.as_str(), c.to_string().as_str()]).map_err(io)?;
            } else {
                w.write_record([t.as_str(), v.as_str()]).map_err(io)?;
            }
        }
    }
    w.flush().map_err(|e| CliError::input(format!("writing signal: {e}")))
}
