//! Event files and their parameter sidecars.
//!
//! An event file is a scheme tag line, a CSV header, one record per spike in
//! time order, and a trailer carrying the record count:
//!
//! ```text
//! # spikecodec events v1 scheme=sf
//! t,polarity,channel
//! 0.03,1,0
//! # end events=1
//! ```
//!
//! Population schemes use `t,neuron,subtime,channel` records. Everything the
//! decoder needs beyond the spikes lives in `<events>.params`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spikecodec::population::{GrfEncodeResult, GrfParams};
use spikecodec::rate::RateEncodeResult;
use spikecodec::temporal::TemporalEncodeResult;
use spikecodec::types::time_to_index;
use spikecodec::{CodecParams, Encoded, FirFilter, PopulationSpikes, Scheme, Signal, SpikeTrain};

use crate::error::{CliError, CliResult};

pub const EVENTS_VERSION: u32 = 1;
pub const SIDECAR_VERSION: u32 = 1;
const TAG_PREFIX: &str = "# spikecodec events";
const TRAILER_PREFIX: &str = "# end events=";

/// Per-channel decoder state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSide {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neurons: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtimes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub version: u32,
    pub scheme: Scheme,
    pub sample_rate: f64,
    pub t0: f64,
    /// Samples per channel.
    pub samples: usize,
    pub events: usize,
    /// Seed of probabilistic GRF spiking, recorded for reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub channel: Vec<ChannelSide>,
}

pub fn sidecar_path(events: &Path) -> PathBuf {
    let mut s = events.as_os_str().to_owned();
    s.push(".params");
    PathBuf::from(s)
}

impl Sidecar {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sidecar serializes")
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let s: Self = toml::from_str(text).map_err(|e| CliError::input(format!("sidecar: {}", e.message())))?;
        if s.version != SIDECAR_VERSION {
            return Err(CliError::input(format!("sidecar: unsupported version {}", s.version)));
        }
        if s.channel.is_empty() || s.samples == 0 {
            return Err(CliError::input("sidecar: no channels or samples"));
        }
        Ok(s)
    }
}

/// Channel-wise encoder output with the shared time base.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSignal {
    pub scheme: Scheme,
    pub sample_rate: f64,
    pub t0: f64,
    pub samples: usize,
    pub seed: Option<u64>,
    pub channels: Vec<Encoded>,
}

fn side_of(encoded: &Encoded, params: &CodecParams) -> ChannelSide {
    match encoded {
        Encoded::Temporal { result, .. } => ChannelSide {
            init: Some(result.init),
            threshold: Some(result.threshold),
            factor: params.factor,
            window: params.window,
            ..Default::default()
        },
        Encoded::Rate { result, filter, .. } => ChannelSide {
            shift: Some(result.shift),
            threshold: params.threshold,
            filter: Some(filter.coefficients().to_vec()),
            ..Default::default()
        },
        Encoded::Position { distribution, .. } => {
            ChannelSide { distribution: Some(distribution.clone()), ..Default::default() }
        }
        Encoded::Grf(r) => ChannelSide {
            neurons: Some(r.params.m),
            subtimes: Some(r.params.n),
            min: Some(r.params.min_sig),
            max: Some(r.params.max_sig),
            ..Default::default()
        },
    }
}

impl EncodedSignal {
    pub fn sidecar(&self, params: &[CodecParams]) -> Sidecar {
        Sidecar {
            version: SIDECAR_VERSION,
            scheme: self.scheme,
            sample_rate: self.sample_rate,
            t0: self.t0,
            samples: self.samples,
            events: self.event_count(),
            seed: self.seed,
            channel: self.channels.iter().zip(params).map(|(e, p)| side_of(e, p)).collect(),
        }
    }

    fn event_count(&self) -> usize {
        self.channels
            .iter()
            .map(|e| match e {
                Encoded::Temporal { result, .. } => result.train.spike_count(),
                Encoded::Rate { result, .. } => result.train.spike_count(),
                Encoded::Position { spikes, .. } => spikes.spike_count(),
                Encoded::Grf(r) => r.spikes.spike_count(),
            })
            .sum()
    }

    fn timestamp(&self, i: usize) -> f64 {
        self.t0 + i as f64 / self.sample_rate
    }

    /// Serialized event file, ordered by timestep, then channel.
    pub fn to_event_file(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{TAG_PREFIX} v{EVENTS_VERSION} scheme={}", self.scheme);
        let population = self.scheme.is_population();
        s.push_str(if population { "t,neuron,subtime,channel\n" } else { "t,polarity,channel\n" });
        let mut count = 0;
        for i in 0..self.samples {
            let t = self.timestamp(i);
            for (c, e) in self.channels.iter().enumerate() {
                match e {
                    Encoded::Temporal { result: TemporalEncodeResult { train, .. }, .. }
                    | Encoded::Rate { result: RateEncodeResult { train, .. }, .. } => {
                        let p = train.polarities()[i];
                        if p != 0 {
                            let _ = writeln!(s, "{t},{p},{c}");
                            count += 1;
                        }
                    }
                    Encoded::Position { spikes, .. } | Encoded::Grf(GrfEncodeResult { spikes, .. }) => {
                        for (sub, neuron) in spikes.spikes_at(i) {
                            let _ = writeln!(s, "{t},{neuron},{sub},{c}");
                            count += 1;
                        }
                    }
                }
            }
        }
        let _ = writeln!(s, "{TRAILER_PREFIX}{count}");
        s
    }

    /// Decodes every channel into one signal.
    pub fn decode(&self) -> CliResult<Signal> {
        let channels = self
            .channels
            .iter()
            .map(|e| e.decode().map(Signal::into_samples))
            .collect::<spikecodec::Result<Vec<_>>>()?;
        Ok(Signal::from_channels(channels, self.sample_rate, self.t0)?)
    }
}

enum Record {
    Polarity { i: usize, polarity: i8, channel: usize },
    Population { i: usize, neuron: usize, sub: usize, channel: usize },
}

/// Parses an event file against its sidecar.
pub fn parse_events(text: &str, side: &Sidecar) -> CliResult<EncodedSignal> {
    let bad = |m: String| CliError::input(format!("events: {m}"));
    let lines: Vec<&str> = text.lines().collect();
    let tag = lines.first().ok_or_else(|| bad("empty file".into()))?;
    let tag = tag.strip_prefix(TAG_PREFIX).ok_or_else(|| bad("missing scheme tag line".into()))?;
    let mut scheme = None;
    for token in tag.split_whitespace() {
        match token.split_once('=') {
            Some(("scheme", v)) => scheme = Some(v.parse::<Scheme>().map_err(bad)?),
            None if token == format!("v{EVENTS_VERSION}") => {}
            _ => return Err(bad(format!("unexpected tag field {token:?}"))),
        }
    }
    let scheme = scheme.ok_or_else(|| bad("tag line has no scheme".into()))?;
    if scheme != side.scheme {
        return Err(bad(format!("event stream is {scheme} but the sidecar describes {}", side.scheme)));
    }
    let trailer = lines.last().and_then(|l| l.strip_prefix(TRAILER_PREFIX));
    let declared: usize = match trailer {
        Some(n) if lines.len() >= 3 => n.trim().parse().map_err(|_| bad("unreadable trailer".into()))?,
        _ => return Err(bad("file is truncated (no end trailer)".into())),
    };
    let body = lines[1..lines.len() - 1].join("\n");
    let population = scheme.is_population();
    let expected_header: &[&str] =
        if population { &["t", "neuron", "subtime", "channel"] } else { &["t", "polarity", "channel"] };

    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(expected_header.iter().copied()) {
        return Err(bad(format!("expected header {}", expected_header.join(","))));
    }
    let mut records = Vec::new();
    let mut last_i = 0;
    for (k, row) in reader.records().enumerate() {
        let line = k + 3;
        let row = row.map_err(|e| bad(format!("line {line}: {e}")))?;
        let field = |j: usize| row.get(j).unwrap_or("");
        let t: f64 = field(0).parse().map_err(|_| bad(format!("line {line}: bad timestamp")))?;
        let i =
            time_to_index(t, side.sample_rate, side.t0, side.samples).map_err(|e| bad(format!("line {line}: {e}")))?;
        if i < last_i {
            return Err(bad(format!("line {line}: timestamps go backwards")));
        }
        last_i = i;
        let int = |j: usize, what: &str| -> CliResult<usize> {
            field(j).parse().map_err(|_| bad(format!("line {line}: bad {what}")))
        };
        let channel = int(expected_header.len() - 1, "channel")?;
        if channel >= side.channel.len() {
            return Err(bad(format!("line {line}: channel {channel} not in sidecar")));
        }
        records.push(if population {
            Record::Population { i, neuron: int(1, "neuron")?, sub: int(2, "subtime")?, channel }
        } else {
            let polarity = match field(1) {
                "1" | "+1" => 1,
                "-1" => -1,
                other => return Err(bad(format!("line {line}: polarity {other:?} is not +1 or -1"))),
            };
            Record::Polarity { i, polarity, channel }
        });
    }
    if records.len() != declared {
        return Err(bad(format!("trailer says {declared} events, file has {}", records.len())));
    }
    if records.len() != side.events {
        return Err(bad(format!("sidecar expects {} events, file has {}", side.events, records.len())));
    }

    let channels = side
        .channel
        .iter()
        .enumerate()
        .map(|(c, cs)| rebuild(scheme, side, c, cs, &records))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(EncodedSignal {
        scheme,
        sample_rate: side.sample_rate,
        t0: side.t0,
        samples: side.samples,
        seed: side.seed,
        channels,
    })
}

fn need<T: Copy>(v: Option<T>, c: usize, name: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::input(format!("sidecar: channel {c} has no {name}")))
}

fn rebuild(scheme: Scheme, side: &Sidecar, c: usize, cs: &ChannelSide, records: &[Record]) -> CliResult<Encoded> {
    let dup = |i: usize| CliError::input(format!("events: duplicate spike at sample {i} on channel {c}"));
    let (rate, t0, len) = (side.sample_rate, side.t0, side.samples);
    if scheme.is_population() {
        let (neurons, subtimes) = match scheme {
            Scheme::Position => {
                let d = cs.distribution.as_ref().ok_or_else(|| CliError::input("sidecar: no distribution"))?;
                (d.len(), 1)
            }
            _ => (need(cs.neurons, c, "neurons")?, need(cs.subtimes, c, "subtimes")?),
        };
        let mut spikes = PopulationSpikes::zeros(len, subtimes, neurons, rate, t0);
        for r in records {
            if let Record::Population { i, neuron, sub, channel } = *r {
                if channel != c {
                    continue;
                }
                if neuron >= neurons || sub >= subtimes {
                    return Err(CliError::input(format!("events: neuron {neuron}/sub-timestep {sub} out of range")));
                }
                if spikes.get(i, sub, neuron) {
                    return Err(dup(i));
                }
                spikes.set(i, sub, neuron);
            }
        }
        return Ok(match scheme {
            Scheme::Position => Encoded::Position { spikes, distribution: cs.distribution.clone().unwrap_or_default() },
            _ => {
                let params = GrfParams::new(neurons, subtimes, need(cs.min, c, "min")?, need(cs.max, c, "max")?)
                    .map_err(|e| CliError::input(format!("sidecar: {e}")))?;
                Encoded::Grf(GrfEncodeResult { spikes, params })
            }
        });
    }

    let mut p = vec![0i8; len];
    for r in records {
        if let Record::Polarity { i, polarity, channel } = *r {
            if channel == c {
                if p[i] != 0 {
                    return Err(dup(i));
                }
                p[i] = polarity;
            }
        }
    }
    let train = SpikeTrain::new(p, rate, t0).map_err(|e| CliError::input(format!("events: {e}")))?;
    Ok(match scheme {
        Scheme::Tbr | Scheme::Sf | Scheme::Mw => Encoded::Temporal {
            scheme,
            result: TemporalEncodeResult {
                train,
                threshold: need(cs.threshold, c, "threshold")?,
                init: need(cs.init, c, "init")?,
            },
        },
        _ => {
            if train.polarities().contains(&-1) {
                return Err(CliError::input(format!("events: {scheme} spikes cannot be negative")));
            }
            let taps = cs.filter.clone().ok_or_else(|| CliError::input("sidecar: no filter"))?;
            Encoded::Rate {
                scheme,
                result: RateEncodeResult { train, shift: need(cs.shift, c, "shift")? },
                filter: FirFilter::new(taps).map_err(|e| CliError::input(format!("sidecar: {e}")))?,
            }
        }
    })
}
