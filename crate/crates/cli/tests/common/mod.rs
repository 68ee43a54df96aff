//! Helpers for driving the `spikecodec` binary from integration tests.

#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use spikecodec::bench::BenchConfig;
use spikecodec::lab::{generate, SignalSpec};
use spikecodec::population::linear_distribution;
use spikecodec::rate::{make_fir_filter, FilterKind};
use spikecodec::{CodecParams, Scheme, Signal};
use tempfile::TempDir;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_spikecodec")
}

/// Runs the binary with `args`, feeding `stdin` if given.
pub fn run(args: &[&str], stdin: Option<&str>) -> Output {
    run_env(args, stdin, &[])
}

pub fn run_env(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.env_remove("SPIKECODEC_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn spikecodec");
    {
        let mut pipe = child.stdin.take().expect("stdin");
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).expect("write stdin");
        }
    }
    child.wait_with_output().expect("wait for spikecodec")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

pub struct Workspace {
    pub dir: TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        Self { dir: tempfile::tempdir().expect("tempdir") }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).expect("write fixture");
        p
    }
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Single-channel signal CSV as written by the CLI.
pub fn signal_csv(signal: &Signal) -> String {
    let mut out = String::from("t,value\n");
    for (i, v) in signal.samples().iter().enumerate() {
        out.push_str(&format!("{},{}\n", signal.timestamp(i), v));
    }
    out
}

/// Parses a single-channel `t,value` CSV.
pub fn parse_signal_csv(text: &str) -> (Vec<f64>, Vec<f64>) {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value"));
    lines
        .map(|l| {
            let (t, v) = l.split_once(',').expect("two columns");
            (t.parse::<f64>().unwrap(), v.parse::<f64>().unwrap())
        })
        .unzip()
}

/// The 1/2/5 Hz mixture, 4 s at 100 Hz.
pub fn example_signal(seed: u64) -> Signal {
    generate(&SignalSpec { seed, ..SignalSpec::default() }).expect("generate")
}

/// Flags and the equivalent in-memory parameters for one scheme.
pub fn scheme_case(scheme: Scheme, signal: &Signal) -> (Vec<String>, CodecParams) {
    let flags = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let gaussian = |len, scale| make_fir_filter(FilterKind::Gaussian, len, scale).unwrap();
    match scheme {
        Scheme::Tbr => (flags(&["--scheme", "tbr", "--factor", "0.5"]), CodecParams::tbr(0.5)),
        Scheme::Sf => (flags(&["--scheme", "sf", "--threshold", "0.35"]), CodecParams::sf(0.35)),
        Scheme::Mw => (flags(&["--scheme", "mw", "--window", "3", "--threshold", "0.2"]), CodecParams::mw(3, 0.2)),
        Scheme::Hsa => (
            flags(&["--scheme", "hsa", "--filter-kind", "gaussian", "--filter-len", "21", "--filter-scale", "0.6"]),
            CodecParams::hsa(gaussian(21, 0.6)),
        ),
        Scheme::Thsa => (
            flags(&[
                "--scheme",
                "thsa",
                "--filter-kind",
                "gaussian",
                "--filter-len",
                "21",
                "--filter-scale",
                "0.6",
                "--threshold",
                "0.6",
            ]),
            CodecParams::thsa(gaussian(21, 0.6), 0.6),
        ),
        Scheme::Bsa => (
            flags(&[
                "--scheme",
                "bsa",
                "--filter-kind",
                "gaussian",
                "--filter-len",
                "7",
                "--filter-scale",
                "1.3",
                "--threshold",
                "0.88",
            ]),
            CodecParams::bsa(gaussian(7, 1.3), 0.88),
        ),
        Scheme::Grf => (flags(&["--scheme", "grf", "--neurons", "10", "--subtimes", "8"]), CodecParams::grf(10, 8)),
        Scheme::Position => {
            let mut p = CodecParams::empty(Scheme::Position);
            p.distribution = Some(linear_distribution(signal.min(), signal.max(), 10));
            (flags(&["--scheme", "position", "--neurons", "10"]), p)
        }
    }
}

pub const ALL_SCHEMES: [Scheme; 8] =
    [Scheme::Tbr, Scheme::Sf, Scheme::Mw, Scheme::Hsa, Scheme::Thsa, Scheme::Bsa, Scheme::Grf, Scheme::Position];

/// Encodes and decodes `signal` through files; returns the decoded values,
/// or a description of the first failing step.
pub fn file_round_trip(ws: &Workspace, name: &str, signal: &Signal, flags: &[String]) -> Result<Vec<f64>, String> {
    let input = ws.write(&format!("{name}.csv"), &signal_csv(signal));
    let events = ws.path(&format!("{name}.events"));
    let decoded = ws.path(&format!("{name}.decoded.csv"));
    let mut args: Vec<&str> = vec!["encode", "-i", s(&input), "-o", s(&events)];
    args.extend(flags.iter().map(String::as_str));
    let out = run(&args, None);
    if code(&out) != 0 {
        return Err(format!("encode exited {}: {}", code(&out), stderr(&out)));
    }
    let out = run(&["decode", "-i", s(&events), "-o", s(&decoded)], None);
    if code(&out) != 0 {
        return Err(format!("decode exited {}: {}", code(&out), stderr(&out)));
    }
    let text = std::fs::read_to_string(&decoded).map_err(|e| e.to_string())?;
    let (t, v) = parse_signal_csv(&text);
    for (i, ti) in t.iter().enumerate() {
        if (ti - signal.timestamp(i)).abs() > 1e-9 {
            return Err(format!("timestamp {i}: {ti} vs {}", signal.timestamp(i)));
        }
    }
    Ok(v)
}

/// Spike records of an event file, without tag, header and trailer.
pub fn event_records(text: &str) -> Vec<String> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(str::to_string).collect()
}

/// One row of the exit-code matrix.
pub struct ExitCase {
    pub label: &'static str,
    pub args: Vec<String>,
    pub stdin: Option<String>,
    pub expected: i32,
}

/// Every subcommand with a success case and its failure classes.
pub fn exit_code_matrix(ws: &Workspace) -> Vec<ExitCase> {
    let signal = example_signal(3);
    let good = ws.write("matrix.csv", &signal_csv(&signal));
    let empty = ws.write("empty.csv", "");
    let short = ws.write("short.csv", "t,value\n0,1\n0.01,2\n");
    let events = ws.path("matrix.events");
    let decoded = ws.path("matrix.decoded.csv");
    let config = ws.write(
        "bench.toml",
        &BenchConfig { samples_per_case: 2, durations: vec![1.0], ..BenchConfig::default() }.to_toml(),
    );
    let bad_config = ws.write("bad_bench.toml", "version = 1\nseed = \"x\"\n");
    let grid = ws.write("grid.toml", "thresholds = [0.2, 0.4]\n");
    let empty_grid = ws.write("empty_grid.toml", "");

    // Encoded once up front so the decode cases have something to read.
    let out = run(&["encode", "--scheme", "sf", "--threshold", "0.35", "-i", s(&good), "-o", s(&events)], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let event_text = std::fs::read_to_string(&events).unwrap();
    let sidecar_text = std::fs::read_to_string(format!("{}.params", s(&events))).unwrap();
    let truncated = ws.write("truncated.events", &event_text[..event_text.len() / 2]);
    std::fs::write(format!("{}.params", s(&truncated)), &sidecar_text).unwrap();
    let lonely = ws.write("lonely.events", &event_text);
    let mismatched = ws.write("mismatched.events", &event_text);
    std::fs::write(format!("{}.params", s(&mismatched)), sidecar_text.replace("scheme = \"sf\"", "scheme = \"mw\""))
        .unwrap();

    let case = |label, args: &[&str], stdin: Option<&str>, expected| ExitCase {
        label,
        args: args.iter().map(|a| a.to_string()).collect(),
        stdin: stdin.map(str::to_string),
        expected,
    };
    vec![
        case(
            "encode ok",
            &["encode", "--scheme", "sf", "--threshold", "0.35", "-i", s(&good), "-o", s(&events)],
            None,
            0,
        ),
        case("encode unknown scheme", &["encode", "--scheme", "nope", "-i", s(&good), "-o", s(&events)], None, 2),
        case("encode missing scheme", &["encode", "-i", s(&good), "-o", s(&events)], None, 2),
        case("encode missing threshold", &["encode", "--scheme", "sf", "-i", s(&good), "-o", s(&events)], None, 2),
        case(
            "encode empty csv",
            &["encode", "--scheme", "sf", "--threshold", "0.35", "-i", s(&empty), "-o", s(&events)],
            None,
            3,
        ),
        case(
            "encode missing input",
            &["encode", "--scheme", "sf", "--threshold", "0.35", "-i", s(&ws.path("absent.csv")), "-o", s(&events)],
            None,
            3,
        ),
        case(
            "encode signal shorter than window",
            &["encode", "--scheme", "mw", "--window", "5", "--threshold", "0.2", "-i", s(&short), "-o", s(&events)],
            None,
            4,
        ),
        case(
            "encode filter longer than signal",
            &["encode", "--scheme", "hsa", "--filter-len", "9", "-i", s(&short), "-o", s(&events)],
            None,
            4,
        ),
        case("decode ok", &["decode", "-i", s(&events), "-o", s(&decoded)], None, 0),
        case("decode truncated events", &["decode", "-i", s(&truncated)], None, 3),
        case("decode missing sidecar", &["decode", "-i", s(&lonely)], None, 3),
        case("decode sidecar scheme mismatch", &["decode", "-i", s(&mismatched)], None, 3),
        case("stream ok", &["stream", "--scheme", "sf", "--threshold", "0.5"], Some("0\n0\n1\n1\n"), 0),
        case("stream skips junk", &["stream", "--scheme", "sf", "--threshold", "0.5"], Some("0\nabc\n1\n"), 0),
        case("stream tbr without threshold", &["stream", "--scheme", "tbr"], Some("0\n1\n"), 2),
        case("stream rate coder", &["stream", "--scheme", "hsa"], Some("0\n1\n"), 2),
        case("bench ok", &["bench", "--config", s(&config)], None, 0),
        case("bench nonexistent config", &["bench", "--config", s(&ws.path("absent.toml"))], None, 2),
        case("bench malformed config", &["bench", "--config", s(&bad_config)], None, 3),
        case("bench zero samples", &["bench", "--config", s(&config), "--samples", "0"], None, 2),
        case("tune ok", &["tune", "--scheme", "sf", "-i", s(&good), "--grid", s(&grid)], None, 0),
        case("tune empty grid", &["tune", "--scheme", "sf", "-i", s(&good), "--grid", s(&empty_grid)], None, 2),
        case("tune empty csv", &["tune", "--scheme", "sf", "-i", s(&empty), "--grid", s(&grid)], None, 3),
        case("generate ok", &["generate", "--duration", "1", "--seed", "4"], None, 0),
        case("generate zero duration", &["generate", "--duration", "0"], None, 2),
        case("generate missing spec", &["generate", "--spec", s(&ws.path("absent.toml"))], None, 2),
        case("unknown subcommand", &["transmogrify"], None, 2),
    ]
}

pub fn run_case(c: &ExitCase) -> Output {
    let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
    run(&args, c.stdin.as_deref())
}

/// Streams `signal` sample by sample and checks the records against the
/// event file written by `encode` with the same explicit parameters.
pub fn stream_vs_batch(ws: &Workspace, scheme: Scheme, signal: &Signal) -> Result<(), String> {
    let (lo, hi) = (signal.min().to_string(), signal.max().to_string());
    let flags: Vec<&str> = match scheme {
        Scheme::Sf => vec!["--scheme", "sf", "--threshold", "0.3"],
        Scheme::Mw => vec!["--scheme", "mw", "--window", "3", "--threshold", "0.2"],
        Scheme::Position => vec!["--scheme", "position", "--neurons", "10"],
        Scheme::Grf => vec!["--scheme", "grf", "--neurons", "10", "--subtimes", "8"],
        other => return Err(format!("{other} does not stream")),
    };
    let input = ws.write("stream.csv", &signal_csv(signal));
    let events = ws.path("stream.events");
    let mut args = vec!["encode", "-i", s(&input), "-o", s(&events)];
    args.extend(&flags);
    let out = run(&args, None);
    if code(&out) != 0 {
        return Err(format!("encode exited {}: {}", code(&out), stderr(&out)));
    }
    let batch = event_records(&std::fs::read_to_string(&events).map_err(|e| e.to_string())?);

    let rate = signal.sample_rate().to_string();
    let t0 = signal.t0().to_string();
    let mut args = vec!["stream", "--sample-rate", rate.as_str(), "--t0", t0.as_str()];
    args.extend(&flags);
    if scheme.is_population() {
        args.extend(["--range-min", lo.as_str(), "--range-max", hi.as_str()]);
    }
    let samples: String = signal.samples().iter().map(|v| format!("{v}\n")).collect();
    let out = run(&args, Some(&samples));
    if code(&out) != 0 {
        return Err(format!("stream exited {}: {}", code(&out), stderr(&out)));
    }
    let streamed: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    if streamed != batch {
        let first = streamed.iter().zip(&batch).position(|(a, b)| a != b);
        return Err(format!(
            "{} streamed vs {} batch records; first difference at {first:?}",
            streamed.len(),
            batch.len()
        ));
    }
    Ok(())
}
