//! Monte-Carlo benchmark: spiking efficiency and reconstruction RMSE per
//! (scheme, duration), aggregated over seeded synthetic signals.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::evaluate;
use crate::error::{CodecError, Result};
use crate::lab::{generate, mean_sd, SignalSpec};
use crate::population::linear_distribution;
use crate::rate::{FilterKind, FilterSpec, BSA_DEFAULT_THRESHOLD};
use crate::seed::sample_seed;
use crate::types::{CodecParams, Scheme, Signal};

pub const BENCH_CONFIG_VERSION: u32 = 1;

/// Per-scheme settings. Filters are stored as recipes and rebuilt for every
/// case; position coding spreads `neurons` values evenly over each signal's
/// range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchScheme {
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neurons: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtimes: Option<usize>,
}

impl BenchScheme {
    fn bare(scheme: Scheme) -> Self {
        Self { scheme, factor: None, threshold: None, window: None, filter: None, neurons: None, subtimes: None }
    }

    /// Tuned defaults for the standard benchmark signal.
    pub fn default_for(scheme: Scheme) -> Self {
        let gaussian = |length, scale| Some(FilterSpec { kind: FilterKind::Gaussian, length, scale });
        match scheme {
            Scheme::Tbr => Self { factor: Some(0.5), ..Self::bare(scheme) },
            Scheme::Sf => Self { threshold: Some(0.45), ..Self::bare(scheme) },
            Scheme::Mw => Self { window: Some(3), threshold: Some(0.19), ..Self::bare(scheme) },
            Scheme::Hsa => Self { filter: gaussian(21, 0.6), ..Self::bare(scheme) },
            Scheme::Thsa => Self { filter: gaussian(21, 0.6), threshold: Some(0.6), ..Self::bare(scheme) },
            Scheme::Bsa => {
                Self { filter: gaussian(7, 1.3), threshold: Some(BSA_DEFAULT_THRESHOLD), ..Self::bare(scheme) }
            }
            Scheme::Grf => Self { neurons: Some(10), subtimes: Some(8), ..Self::bare(scheme) },
            Scheme::Position => Self { neurons: Some(10), ..Self::bare(scheme) },
        }
    }

    /// Concrete codec parameters for one signal.
    pub fn params_for(&self, signal: &Signal) -> Result<CodecParams> {
        let mut p = CodecParams::empty(self.scheme);
        p.factor = self.factor;
        p.threshold = self.threshold;
        p.window = self.window;
        p.filter = self.filter.as_ref().map(FilterSpec::build).transpose()?;
        if self.scheme == Scheme::Position {
            let m = self.neurons.ok_or(CodecError::MissingParameter("neurons"))?;
            p.distribution = Some(linear_distribution(signal.min(), signal.max(), m));
        } else {
            p.neurons = self.neurons;
            p.subtimes = self.subtimes;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub version: u32,
    pub seed: u64,
    pub samples_per_case: usize,
    pub durations: Vec<f64>,
    /// Worker threads; 0 uses every available core. Results do not depend on it.
    #[serde(default)]
    pub workers: usize,
    /// Base signal; its `duration` and `seed` are replaced per case and sample.
    pub signal: SignalSpec,
    pub schemes: Vec<BenchScheme>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            version: BENCH_CONFIG_VERSION,
            seed: 2021,
            samples_per_case: 1000,
            durations: vec![1.0, 5.0, 15.0, 50.0, 100.0],
            workers: 0,
            signal: SignalSpec::benchmark(),
            schemes: [Scheme::Tbr, Scheme::Mw, Scheme::Sf, Scheme::Bsa, Scheme::Hsa, Scheme::Thsa]
                .into_iter()
                .map(BenchScheme::default_for)
                .collect(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.version != BENCH_CONFIG_VERSION {
            return Err(CodecError::InvalidSpec(format!("unsupported bench config version {}", self.version)));
        }
        if self.samples_per_case == 0 {
            return Err(CodecError::OutOfRange { name: "samples_per_case", reason: "must be >= 1".into() });
        }
        if self.durations.is_empty() || self.durations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(CodecError::OutOfRange { name: "durations", reason: "need positive durations".into() });
        }
        if self.schemes.is_empty() {
            return Err(CodecError::InvalidSpec("no schemes selected".into()));
        }
        for d in &self.durations {
            self.signal.with_duration(*d).validate()?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("bench config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CodecError::InvalidSpec(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML form, with
    /// the worker count left out.
    pub fn hash(&self) -> String {
        let canonical = BenchConfig { workers: 0, ..self.clone() }.to_toml();
        Sha256::digest(canonical.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchCell {
    pub scheme: Scheme,
    pub duration: f64,
    pub samples: usize,
    pub efficiency_mean: f64,
    pub efficiency_sd: f64,
    pub rmse_mean: f64,
    pub rmse_sd: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    /// Ordered by duration, then by the configured scheme order.
    pub cells: Vec<BenchCell>,
    pub seed: u64,
    pub config_hash: String,
    pub samples_per_case: usize,
    pub wall_time: Duration,
}

impl PartialEq for BenchReport {
    /// Wall time is excluded.
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.seed == other.seed && self.config_hash == other.config_hash
    }
}

/// Selects a (mean, SD) pair from a cell.
type CellPick = fn(&BenchCell) -> (f64, f64);

impl BenchReport {
    pub fn cell(&self, scheme: Scheme, duration: f64) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.scheme == scheme && c.duration == duration)
    }

    fn schemes(&self) -> Vec<Scheme> {
        let mut out = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.scheme) {
                out.push(c.scheme);
            }
        }
        out
    }

    fn durations(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.duration) {
                out.push(c.duration);
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("scheme,duration,samples,efficiency_mean,efficiency_sd,rmse_mean,rmse_sd\n");
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                c.scheme, c.duration, c.samples, c.efficiency_mean, c.efficiency_sd, c.rmse_mean, c.rmse_sd
            );
        }
        s
    }

    /// Two tables (efficiency, RMSE) with one Mean/SD row pair per duration.
    pub fn to_markdown(&self) -> String {
        let schemes = self.schemes();
        let mut s = String::new();
        let _ = writeln!(s, "# Spike coding benchmark\n");
        let _ = writeln!(
            s,
            "seed {}, config {}, {} samples per case\n",
            self.seed, self.config_hash, self.samples_per_case
        );
        let tables: [(&str, CellPick, usize); 2] = [
            ("Average spiking efficiency (%)", |c| (c.efficiency_mean, c.efficiency_sd), 1),
            ("Average RMSE between original and reconstructed signals", |c| (c.rmse_mean, c.rmse_sd), 2),
        ];
        for (title, pick, digits) in tables {
            let _ = writeln!(s, "## {title}\n");
            let header: Vec<&str> = schemes.iter().map(|sc| sc.label()).collect();
            let _ = writeln!(s, "| | {} |", header.join(" | "));
            let _ = writeln!(s, "|---|{}", "---|".repeat(schemes.len()));
            for (k, d) in self.durations().iter().enumerate() {
                let _ = writeln!(s, "| *Case #{} -- T_max = {} s* |{}", k + 1, d, " |".repeat(schemes.len()));
                let row = |f: fn((f64, f64)) -> f64| -> String {
                    schemes
                        .iter()
                        .map(|sc| self.cell(*sc, *d).map_or("-".to_string(), |c| format!("{:.*}", digits, f(pick(c)))))
                        .collect::<Vec<_>>()
                        .join(" | ")
                };
                let _ = writeln!(s, "| Mean | {} |", row(|v| v.0));
                let _ = writeln!(s, "| SD | {} |", row(|v| v.1));
            }
            s.push('\n');
        }
        s
    }

    /// One line per cell, for terminals.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{:>8} {:>6}s  efficiency {:6.2} ± {:5.2}  rmse {:8.4} ± {:7.4}",
                c.scheme.label(),
                c.duration,
                c.efficiency_mean,
                c.efficiency_sd,
                c.rmse_mean,
                c.rmse_sd
            );
        }
        s
    }
}

type SampleMetrics = Vec<(f64, f64)>;

fn run_sample(config: &BenchConfig, case: usize, sample: usize) -> Result<SampleMetrics> {
    let duration = config.durations[case];
    let seed = sample_seed(config.seed, case as u64, sample as u64);
    let signal = generate(&config.signal.with_duration(duration).with_seed(seed))?;
    config
        .schemes
        .iter()
        .map(|bs| {
            bs.params_for(&signal).and_then(|p| evaluate(&signal, &p)).map_err(|e| CodecError::Bench {
                scheme: bs.scheme.to_string(),
                duration,
                sample,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let start = Instant::now();
    let jobs: Vec<(usize, usize)> =
        (0..config.durations.len()).flat_map(|d| (0..config.samples_per_case).map(move |k| (d, k))).collect();
    let work = || -> Result<Vec<SampleMetrics>> { jobs.par_iter().map(|&(d, k)| run_sample(config, d, k)).collect() };
    let results = if config.workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| CodecError::InvalidSpec(format!("worker pool: {e}")))?
            .install(work)?
    };

    let n = config.samples_per_case;
    let mut cells = Vec::with_capacity(config.durations.len() * config.schemes.len());
    for (d, duration) in config.durations.iter().enumerate() {
        let case = &results[d * n..(d + 1) * n];
        for (s, bs) in config.schemes.iter().enumerate() {
            let eff: Vec<f64> = case.iter().map(|m| m[s].0).collect();
            let err: Vec<f64> = case.iter().map(|m| m[s].1).collect();
            let (efficiency_mean, efficiency_sd) = mean_sd(&eff);
            let (rmse_mean, rmse_sd) = mean_sd(&err);
            cells.push(BenchCell {
                scheme: bs.scheme,
                duration: *duration,
                samples: n,
                efficiency_mean,
                efficiency_sd,
                rmse_mean,
                rmse_sd,
            });
        }
    }
    Ok(BenchReport {
        cells,
        seed: config.seed,
        config_hash: config.hash(),
        samples_per_case: n,
        wall_time: start.elapsed(),
    })
}
