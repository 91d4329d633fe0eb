//! File formats: CSV tables for signals, spikes, reconstructions and benchmark
//! summaries, flat `key=value` parameter and normalization files, and the
//! run configuration file.
//!
//! CSV output uses `,` separators and `\n` line endings, with no trailing
//! separator. Floats are written in their shortest round-trip decimal form,
//! padded with zeros to at least 9 significant digits, so reruns are
//! byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bench::{mean_rows, BenchConfig, BenchmarkReport, CellMetrics, DEFAULT_REPEATS};
use crate::encoders::{ConverterParams, Method, ParamKind, ParamValue};
use crate::generators::{
    GeneratorSpec, SignalKind, DEFAULT_LENGTH, DEFAULT_NOISE_STD, DEFAULT_PERIODS, DEFAULT_TREND_SLOPE,
};
use crate::optimizer::{Dimension, Domain, OptimizationResult, Scale, DEFAULT_BSA_TRIALS, DEFAULT_TRIALS};
use crate::signal::{running_mse, NormKind, NormalizationRecord, Signal, SpikeTrain};
use crate::Error as CoreError;

pub const SIGNAL_HEADER: &str = "step,amplitude";
pub const SPIKE_HEADER: &str = "step,spike";
pub const RECONSTRUCTION_HEADER: &str = "step,original,reconstructed,mse";
pub const MIN_SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

fn parse_err(line: u64, message: impl Into<String>) -> ReportError {
    ReportError::Parse { line, message: message.into() }
}

/// Shortest round-trip decimal, zero-padded to at least 9 significant digits.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let mut s = format!("{x}");
    let significant = s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
    if significant < MIN_SIGNIFICANT_DIGITS {
        if !s.contains('.') {
            s.push('.');
        }
        s.extend(std::iter::repeat_n('0', MIN_SIGNIFICANT_DIGITS - significant));
    }
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn signal_csv(signal: &[f64]) -> String {
    let mut out = String::with_capacity(signal.len() * 24);
    out.push_str(SIGNAL_HEADER);
    out.push('\n');
    for (t, x) in signal.iter().enumerate() {
        let _ = writeln!(out, "{},{}", t + 1, format_float(*x));
    }
    out
}

pub fn spikes_csv(train: &SpikeTrain) -> String {
    let mut out = String::with_capacity(train.len() * 8);
    out.push_str(SPIKE_HEADER);
    out.push('\n');
    for (t, s) in train.spikes().iter().enumerate() {
        let _ = writeln!(out, "{},{s}", t + 1);
    }
    out
}

/// Per-step original, reconstruction and running MSE.
pub fn reconstruction_csv(original: &[f64], reconstructed: &[f64]) -> Result<String, ReportError> {
    let running = running_mse(original, reconstructed)?;
    let mut out = String::with_capacity(original.len() * 64);
    out.push_str(RECONSTRUCTION_HEADER);
    out.push('\n');
    for t in 0..original.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            t + 1,
            format_float(original[t]),
            format_float(reconstructed[t]),
            format_float(running[t])
        );
    }
    Ok(out)
}

/// Reads one numeric column by header name; line numbers in errors are 1-based file lines.
fn read_column(text: &str, column: &str) -> Result<Vec<(u64, String)>, ReportError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let index = headers.iter().position(|h| h == column).ok_or_else(|| {
        parse_err(1, format!("missing column '{column}' in header '{}'", headers.iter().collect::<Vec<_>>().join(",")))
    })?;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = record.get(index).ok_or_else(|| parse_err(line, format!("missing '{column}' field")))?;
        values.push((line, field.to_string()));
    }
    Ok(values)
}

/// Parses the `amplitude` column of a `step,amplitude` file.
pub fn parse_signal_csv(text: &str) -> Result<Signal, ReportError> {
    let rows = read_column(text, "amplitude")?;
    let samples = rows
        .into_iter()
        .map(|(line, field)| {
            field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(line, format!("'{field}' is not a finite number")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if samples.is_empty() {
        return Err(parse_err(1, "no samples"));
    }
    Ok(Signal::new(samples)?)
}

pub fn parse_spikes_csv(text: &str) -> Result<SpikeTrain, ReportError> {
    let rows = read_column(text, "spike")?;
    let spikes = rows
        .into_iter()
        .map(|(line, field)| match field.parse::<i8>() {
            Ok(s @ -1..=1) => Ok(s),
            _ => Err(parse_err(line, format!("'{field}' is not a spike value (-1, 0 or 1)"))),
        })
        .collect::<Result<Vec<i8>, _>>()?;
    let polarity =
        if spikes.contains(&-1) { crate::signal::Polarity::Bipolar } else { crate::signal::Polarity::Unipolar };
    Ok(SpikeTrain::new(spikes, polarity)?)
}

/// Non-empty, non-comment `key=value` lines with their 1-based line numbers.
pub fn parse_key_values(text: &str) -> Result<Vec<(u64, String, String)>, ReportError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| parse_err(i as u64 + 1, format!("expected key=value, got '{line}'")))?;
        out.push((i as u64 + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

pub fn params_to_text(params: &ConverterParams) -> String {
    let mut out = format!("method={}\n", params.method());
    for (name, value) in params.to_pairs() {
        let _ = writeln!(out, "{name}={value}");
    }
    out
}

/// Reads a params file. A `method` line, when present, must agree with `method`.
pub fn params_from_text(text: &str, method: Option<Method>) -> Result<ConverterParams, ReportError> {
    let entries = parse_key_values(text)?;
    let declared = entries
        .iter()
        .find(|(_, k, _)| k == "method")
        .map(|(line, _, v)| v.parse::<Method>().map_err(|e| parse_err(*line, e.to_string())))
        .transpose()?;
    let method = match (method, declared) {
        (Some(a), Some(b)) if a != b => return Err(ReportError::Config(format!("params file is for {b}, not {a}"))),
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => return Err(ReportError::Config("params file does not name a method".into())),
    };
    let mut pairs = Vec::new();
    for (line, key, value) in &entries {
        if key == "method" {
            continue;
        }
        let kind = method
            .param_kind(key)
            .ok_or_else(|| parse_err(*line, format!("{} has no parameter '{key}'", method.label())))?;
        let value = ParamValue::parse(kind, value).map_err(|e| parse_err(*line, e.to_string()))?;
        pairs.push((key.as_str(), value));
    }
    Ok(ConverterParams::from_pairs(method, pairs)?)
}

pub fn record_to_text(record: &NormalizationRecord) -> String {
    let kind = match record.kind {
        NormKind::MinMax => "minmax",
        NormKind::ZScore => "zscore",
    };
    format!("kind={kind}\noffset={}\nscale={}\n", record.offset, record.scale)
}

pub fn record_from_text(text: &str) -> Result<NormalizationRecord, ReportError> {
    let mut kind = None;
    let mut offset = None;
    let mut scale = None;
    for (line, key, value) in parse_key_values(text)? {
        let number = || value.parse::<f64>().map_err(|_| parse_err(line, format!("'{value}' is not a number")));
        match key.as_str() {
            "kind" => {
                kind = Some(match value.as_str() {
                    "minmax" => NormKind::MinMax,
                    "zscore" => NormKind::ZScore,
                    _ => return Err(parse_err(line, format!("unknown normalization kind '{value}'"))),
                })
            }
            "offset" => offset = Some(number()?),
            "scale" => scale = Some(number()?),
            _ => return Err(parse_err(line, format!("unknown key '{key}'"))),
        }
    }
    match (kind, offset, scale) {
        (Some(k), Some(o), Some(s)) => Ok(NormalizationRecord::new(k, o, s)?),
        _ => Err(ReportError::Config("normalization file needs kind, offset and scale".into())),
    }
}

/// `trial,mse,<param columns>`, trials numbered from 1.
pub fn trials_csv(result: &OptimizationResult) -> String {
    let method = result.best_params.method();
    let mut out = String::from("trial,mse");
    for (name, _) in method.params() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for trial in &result.trials {
        let _ = write!(out, "{},{}", trial.index + 1, format_float(trial.mse));
        for (_, value) in trial.params.to_pairs() {
            match value {
                ParamValue::Real(x) => {
                    let _ = write!(out, ",{}", format_float(x));
                }
                v => {
                    let _ = write!(out, ",{v}");
                }
            }
        }
        out.push('\n');
    }
    out
}

fn summary_table(report: &BenchmarkReport, value: impl Fn(&CellMetrics) -> String) -> String {
    let methods = report.methods();
    let mut out = String::from("signal");
    for m in &methods {
        out.push(',');
        out.push_str(m.label());
    }
    out.push('\n');
    for signal in report.signal_names() {
        out.push_str(signal);
        for &m in &methods {
            out.push(',');
            match report.cell(m, signal).and_then(|c| c.metrics()) {
                Some(metrics) => out.push_str(&value(metrics)),
                None => out.push_str("nan"),
            }
        }
        out.push('\n');
    }
    out
}

/// Rows are signals, columns are methods.
pub fn reconstruction_error_csv(report: &BenchmarkReport) -> String {
    summary_table(report, |m| format_float(m.mse))
}

/// Percent of time steps with a spike.
pub fn sparsity_csv(report: &BenchmarkReport) -> String {
    summary_table(report, |m| format_float(m.sparsity_pct))
}

/// Median encode time in milliseconds.
pub fn timing_csv(report: &BenchmarkReport) -> String {
    summary_table(report, |m| format_float(m.encode_time.as_secs_f64() * 1e3))
}

pub fn means_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("method,mean_mse,mean_sparsity_pct,mean_time_ms\n");
    for mean in mean_rows(report) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            mean.method.label(),
            format_float(mean.mse),
            format_float(mean.sparsity_pct),
            format_float(mean.encode_time.as_secs_f64() * 1e3)
        );
    }
    out
}

pub fn best_params_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("signal,method,params\n");
    for row in &report.rows {
        if let Some(m) = row.metrics() {
            let params: Vec<String> = m.best_params.to_pairs().iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "{},{},{}", row.signal, row.method.label(), params.join(";"));
        }
    }
    out
}

pub fn environment_text(report: &BenchmarkReport) -> String {
    let env = &report.environment;
    format!(
        "seed={}\ntrials={}\nbsa_trials={}\nrepeats={}\ntimestamp={}\nbuild={}\n",
        env.seed, env.n_trials, env.bsa_trials, env.repeats, env.timestamp, env.build
    )
}

/// Feature indices of the per-cell reconstruction files.
///
/// With a single signal the index is the method's fixed position
/// (1 = LIF, 2 = SF, 3 = PWM, 4 = BSA). Otherwise cells are numbered from 1
/// in report order (signal-major).
pub fn feature_assignments(report: &BenchmarkReport) -> Vec<(usize, Method, String)> {
    let single = report.signal_names().len() == 1;
    report
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let k = if single { row.method.feature_index() } else { i + 1 };
            (k, row.method, row.signal.clone())
        })
        .collect()
}

pub fn manifest_csv(assignments: &[(usize, Method, String)]) -> String {
    let mut out = String::from("feature,method,signal,file\n");
    for (k, method, signal) in assignments {
        let _ = writeln!(out, "{k},{},{signal},{}", method.label(), feature_file_name(*k));
    }
    out
}

pub fn feature_file_name(k: usize) -> String {
    format!("reconstruction_feature_{k}.csv")
}

pub fn signal_file_name(kind: SignalKind) -> String {
    format!("signal_{kind}.csv")
}

/// Writes every artifact of a benchmark run into `dir`.
pub fn write_bench_outputs(report: &BenchmarkReport, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let mut written = Vec::new();
    let mut put = |name: String, contents: String| -> Result<(), ReportError> {
        let path = dir.join(name);
        write_atomic(&path, &contents)?;
        written.push(path);
        Ok(())
    };
    let assignments = feature_assignments(report);
    for ((k, _, _), row) in assignments.iter().zip(&report.rows) {
        if let Some(m) = row.metrics() {
            put(feature_file_name(*k), reconstruction_csv(&m.original, &m.reconstruction)?)?;
        }
    }
    put("manifest.csv".into(), manifest_csv(&assignments))?;
    put("reconstruction_error.csv".into(), reconstruction_error_csv(report))?;
    put("sparsity.csv".into(), sparsity_csv(report))?;
    put("timing.csv".into(), timing_csv(report))?;
    put("means.csv".into(), means_csv(report))?;
    put("best_params.csv".into(), best_params_csv(report))?;
    put("run_info.txt".into(), environment_text(report))?;
    Ok(written)
}

/// Settings shared by the commands, read from a flat `key=value` file.
///
/// Recognized keys: `seed`, `trials`, `bsa_trials`, `repeats`, `out_dir`,
/// `length`, `periods`, `noise_std`, `trend_slope`, `methods` and `signals`
/// (comma-separated lists), and search-space overrides
/// `<method>.<param>.{low,high,scale,choices}` where `scale` is `linear` or
/// `log` and `choices` is a comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: usize,
    pub bsa_trials: usize,
    pub repeats: usize,
    pub out_dir: PathBuf,
    pub length: usize,
    pub periods: u32,
    pub noise_std: f64,
    pub trend_slope: f64,
    pub methods: Vec<Method>,
    pub signals: Vec<SignalKind>,
    pub space_overrides: Vec<(Method, Dimension)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: DEFAULT_TRIALS,
            bsa_trials: DEFAULT_BSA_TRIALS,
            repeats: DEFAULT_REPEATS,
            out_dir: PathBuf::from("."),
            length: DEFAULT_LENGTH,
            periods: DEFAULT_PERIODS,
            noise_std: DEFAULT_NOISE_STD,
            trend_slope: DEFAULT_TREND_SLOPE,
            methods: Method::ALL.to_vec(),
            signals: SignalKind::ALL.to_vec(),
            space_overrides: Vec::new(),
        }
    }
}

#[derive(Default)]
struct PendingDimension {
    low: Option<String>,
    high: Option<String>,
    scale: Option<Scale>,
    choices: Option<String>,
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| e.to_string()))
        .collect()
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self, ReportError> {
        let mut config = Self::default();
        let mut pending: BTreeMap<(Method, String), PendingDimension> = BTreeMap::new();
        for (line, key, value) in parse_key_values(text)? {
            let fail = |msg: String| parse_err(line, msg);
            if let Some((method, rest)) = key.split_once('.') {
                let method: Method = method.parse().map_err(|e: CoreError| fail(e.to_string()))?;
                let (param, field) = rest
                    .split_once('.')
                    .ok_or_else(|| fail(format!("expected <method>.<param>.<field>, got '{key}'")))?;
                if method.param_kind(param).is_none() {
                    return Err(fail(format!("{} has no parameter '{param}'", method.label())));
                }
                let slot = pending.entry((method, param.to_string())).or_default();
                match field {
                    "low" => slot.low = Some(value),
                    "high" => slot.high = Some(value),
                    "choices" => slot.choices = Some(value),
                    "scale" => {
                        slot.scale = Some(match value.as_str() {
                            "linear" => Scale::Linear,
                            "log" => Scale::Log,
                            _ => return Err(fail(format!("scale must be linear or log, got '{value}'"))),
                        })
                    }
                    _ => return Err(fail(format!("unknown key '{key}'"))),
                }
            } else {
                config.set(&key, &value).map_err(fail)?;
            }
        }
        for ((method, param), dim) in pending {
            let kind = method.param_kind(&param).expect("checked above");
            let domain =
                Self::build_domain(kind, dim).map_err(|e| ReportError::Config(format!("{method}.{param}: {e}")))?;
            config.space_overrides.push((method, Dimension::new(param, domain)));
        }
        Ok(config)
    }

    fn build_domain(kind: ParamKind, dim: PendingDimension) -> Result<Domain, String> {
        if let Some(choices) = dim.choices {
            if dim.low.is_some() || dim.high.is_some() {
                return Err("use either choices or low/high".into());
            }
            let values = choices
                .split(',')
                .map(|c| ParamValue::parse(kind, c).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Domain::Choice(values));
        }
        let (Some(low), Some(high)) = (dim.low, dim.high) else {
            return Err("both low and high are required".into());
        };
        let scale = dim.scale.unwrap_or(Scale::Linear);
        match kind {
            ParamKind::Real => Ok(Domain::Real {
                low: low.parse().map_err(|_| format!("bad low '{low}'"))?,
                high: high.parse().map_err(|_| format!("bad high '{high}'"))?,
                scale,
            }),
            ParamKind::Int => Ok(Domain::Int {
                low: low.parse().map_err(|_| format!("bad low '{low}'"))?,
                high: high.parse().map_err(|_| format!("bad high '{high}'"))?,
                scale,
            }),
            ParamKind::Bool => Err("boolean parameters take choices only".into()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    /// Sets one top-level key; command-line flags go through here too.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("invalid value '{value}' for '{key}'"))
        }
        match key {
            "seed" => self.seed = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "bsa_trials" => self.bsa_trials = num(key, value)?,
            "repeats" => self.repeats = num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "length" => self.length = num(key, value)?,
            "periods" => self.periods = num(key, value)?,
            "noise_std" => self.noise_std = num(key, value)?,
            "trend_slope" => self.trend_slope = num(key, value)?,
            "methods" => self.methods = parse_list(value)?,
            "signals" => self.signals = parse_list(value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    pub fn generator_spec(&self, kind: SignalKind) -> GeneratorSpec {
        GeneratorSpec {
            kind,
            length: self.length,
            seed: self.seed,
            periods: self.periods,
            noise_std: self.noise_std,
            trend_slope: self.trend_slope,
        }
    }

    pub fn bench_config(&self) -> BenchConfig {
        let mut config =
            BenchConfig::new(self.methods.clone(), self.signals.iter().map(|&k| self.generator_spec(k)).collect());
        config.n_trials = self.trials;
        config.bsa_trials = self.bsa_trials;
        config.seed = self.seed;
        config.repeats = self.repeats;
        config.space_overrides = self.space_overrides.clone();
        config
    }
}
