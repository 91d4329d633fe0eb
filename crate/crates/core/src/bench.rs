//! Benchmark grid: optimize every (method, signal) cell, then measure
//! reconstruction error, sparsity and encode wall time with the best parameters.
//!
//! Cells are optimized in parallel. Timing runs afterwards on the calling
//! thread, one cell at a time, and covers only the encoding loop including
//! spike-train allocation; normalization happens before the clock starts.

use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::encoders::{ConverterParams, Method};
use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorSpec};
use crate::optimizer::{optimize, Dimension, SearchSpace, DEFAULT_BSA_TRIALS, DEFAULT_TRIALS};
use crate::signal::{sparsity, Signal};

pub const DEFAULT_REPEATS: usize = 5;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub signals: Vec<GeneratorSpec>,
    pub n_trials: usize,
    pub bsa_trials: usize,
    pub seed: u64,
    pub repeats: usize,
    /// Replace single dimensions of the per-signal default search spaces.
    pub space_overrides: Vec<(Method, Dimension)>,
}

impl BenchConfig {
    pub fn new(methods: Vec<Method>, signals: Vec<GeneratorSpec>) -> Self {
        Self {
            methods,
            signals,
            n_trials: DEFAULT_TRIALS,
            bsa_trials: DEFAULT_BSA_TRIALS,
            seed: 0,
            repeats: DEFAULT_REPEATS,
            space_overrides: Vec::new(),
        }
    }

    pub fn trials_for(&self, method: Method) -> usize {
        match method {
            Method::Bsa => self.bsa_trials,
            _ => self.n_trials,
        }
    }

    pub fn space_for(&self, method: Method, signal: &Signal) -> Result<SearchSpace> {
        let mut space = SearchSpace::default_for(method, signal);
        for (m, dim) in &self.space_overrides {
            if *m != method {
                continue;
            }
            match space.dimension_mut(&dim.name) {
                Some(slot) => *slot = dim.clone(),
                None => return Err(Error::EmptySpace(format!("{} has no parameter '{}'", method.label(), dim.name))),
            }
        }
        // Re-validate the merged space.
        SearchSpace::new(method, space.dimensions().to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellMetrics {
    pub mse: f64,
    pub sparsity_pct: f64,
    pub encode_time: Duration,
    pub best_params: ConverterParams,
    pub original: Signal,
    pub reconstruction: Signal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub method: Method,
    pub signal: String,
    /// Failure message when the cell could not be evaluated.
    pub outcome: std::result::Result<CellMetrics, String>,
}

impl CellResult {
    pub fn metrics(&self) -> Option<&CellMetrics> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub seed: u64,
    pub n_trials: usize,
    pub bsa_trials: usize,
    pub repeats: usize,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub build: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    /// Signal-major, methods in the requested order.
    pub rows: Vec<CellResult>,
    pub environment: Environment,
}

impl BenchmarkReport {
    pub fn cell(&self, method: Method, signal: &str) -> Option<&CellResult> {
        self.rows.iter().find(|c| c.method == method && c.signal == signal)
    }

    pub fn first_failure(&self) -> Option<&CellResult> {
        self.rows.iter().find(|c| c.outcome.is_err())
    }

    pub fn signal_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !names.contains(&row.signal.as_str()) {
                names.push(&row.signal);
            }
        }
        names
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut methods: Vec<Method> = Vec::new();
        for row in &self.rows {
            if !methods.contains(&row.method) {
                methods.push(row.method);
            }
        }
        methods
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodMean {
    pub method: Method,
    pub mse: f64,
    pub sparsity_pct: f64,
    pub encode_time: Duration,
    /// Successful cells averaged.
    pub cells: usize,
}

fn optimize_cell(config: &BenchConfig, method: Method, signal: &Signal) -> Result<CellMetrics> {
    let space = config.space_for(method, signal)?;
    let result = optimize(signal, &space, config.trials_for(method), config.seed)?;
    let trip = result.best_params.round_trip(signal)?;
    Ok(CellMetrics {
        mse: result.best_mse,
        sparsity_pct: 100.0 * sparsity(&trip.encoded.spikes),
        encode_time: Duration::ZERO,
        best_params: result.best_params,
        original: signal.clone(),
        reconstruction: trip.reconstruction,
    })
}

/// Median wall time of `repeats` calls to the encoding step alone.
pub fn time_encode(params: &ConverterParams, signal: &Signal, repeats: usize) -> Result<Duration> {
    if repeats == 0 {
        return Err(Error::InvalidParams("repeats must be at least 1".into()));
    }
    let (input, _) = params.prepare(signal)?;
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        let spikes = params.encode_prepared(&input)?;
        samples.push(start.elapsed());
        std::hint::black_box(spikes);
    }
    samples.sort();
    let mid = samples.len() / 2;
    Ok(if samples.len() % 2 == 1 { samples[mid] } else { (samples[mid - 1] + samples[mid]) / 2 })
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchmarkReport> {
    if config.methods.is_empty() || config.signals.is_empty() {
        return Err(Error::InvalidParams("benchmark needs at least one method and one signal".into()));
    }
    if config.repeats == 0 {
        return Err(Error::InvalidParams("repeats must be at least 1".into()));
    }

    let signals: Vec<(String, std::result::Result<Signal, String>)> =
        config.signals.iter().map(|spec| (spec.kind.to_string(), generate(spec).map_err(|e| e.to_string()))).collect();

    let cells: Vec<(Method, usize)> =
        (0..signals.len()).flat_map(|s| config.methods.iter().map(move |&m| (m, s))).collect();

    let mut rows: Vec<CellResult> = cells
        .par_iter()
        .map(|&(method, s)| {
            let (name, signal) = &signals[s];
            let outcome = signal.clone().and_then(|sig| optimize_cell(config, method, &sig).map_err(|e| e.to_string()));
            CellResult { method, signal: name.clone(), outcome }
        })
        .collect();

    for row in &mut rows {
        if let Ok(metrics) = &mut row.outcome {
            match time_encode(&metrics.best_params, &metrics.original, config.repeats) {
                Ok(t) => metrics.encode_time = t,
                Err(e) => row.outcome = Err(e.to_string()),
            }
        }
    }

    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(BenchmarkReport {
        rows,
        environment: Environment {
            seed: config.seed,
            n_trials: config.n_trials,
            bsa_trials: config.bsa_trials,
            repeats: config.repeats,
            timestamp,
            build: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
        },
    })
}

/// Per-method arithmetic means over the successful cells, in report order.
pub fn mean_rows(report: &BenchmarkReport) -> Vec<MethodMean> {
    report
        .methods()
        .into_iter()
        .filter_map(|method| {
            let ok: Vec<&CellMetrics> =
                report.rows.iter().filter(|c| c.method == method).filter_map(CellResult::metrics).collect();
            if ok.is_empty() {
                return None;
            }
            let n = ok.len() as f64;
            Some(MethodMean {
                method,
                mse: ok.iter().map(|m| m.mse).sum::<f64>() / n,
                sparsity_pct: ok.iter().map(|m| m.sparsity_pct).sum::<f64>() / n,
                encode_time: ok.iter().map(|m| m.encode_time).sum::<Duration>() / ok.len() as u32,
                cells: ok.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::SignalKind;
    use crate::optimizer::Domain;

    fn small(kind: SignalKind) -> GeneratorSpec {
        GeneratorSpec::new(kind, 1).with_length(512)
    }

    #[test]
    fn single_cell_matches_optimizer() {
        let mut config = BenchConfig::new(vec![Method::Sf], vec![small(SignalKind::Sinusoidal)]);
        config.n_trials = 50;
        config.repeats = 3;
        let report = run_benchmark(&config).unwrap();
        assert_eq!(report.rows.len(), 1);
        let cell = report.rows[0].metrics().unwrap();

        let signal = generate(&small(SignalKind::Sinusoidal)).unwrap();
        let direct = optimize(&signal, &SearchSpace::default_for(Method::Sf, &signal), 50, 0).unwrap();
        assert_eq!(cell.mse, direct.best_mse);
        assert_eq!(cell.best_params, direct.best_params);
        assert!((0.0..=100.0).contains(&cell.sparsity_pct));

        let means = mean_rows(&report);
        assert_eq!(means.len(), 1);
        assert_eq!(means[0].mse, cell.mse);
    }

    #[test]
    fn grid_shape_and_reproducibility() {
        let mut config = BenchConfig::new(Method::ALL.to_vec(), SignalKind::ALL.iter().map(|&k| small(k)).collect());
        config.n_trials = 8;
        config.bsa_trials = 8;
        config.repeats = 1;
        let a = run_benchmark(&config).unwrap();
        let b = run_benchmark(&config).unwrap();
        assert_eq!(a.rows.len(), 16);
        assert_eq!(mean_rows(&a).len(), 4);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            let (mx, my) = (x.metrics().unwrap(), y.metrics().unwrap());
            assert_eq!((mx.mse, mx.sparsity_pct, mx.best_params), (my.mse, my.sparsity_pct, my.best_params));
        }
        for method in Method::ALL {
            let cells: Vec<f64> =
                a.rows.iter().filter(|c| c.method == method).map(|c| c.metrics().unwrap().mse).collect();
            let mean = mean_rows(&a).into_iter().find(|m| m.method == method).unwrap().mse;
            assert!((mean - cells.iter().sum::<f64>() / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn failed_cells_are_isolated() {
        let mut bad = small(SignalKind::Sinusoidal);
        bad.periods = 0;
        let mut config = BenchConfig::new(vec![Method::Sf, Method::Lif], vec![bad, small(SignalKind::Trended)]);
        config.n_trials = 5;
        config.repeats = 1;
        let report = run_benchmark(&config).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows[0].outcome.is_err() && report.rows[1].outcome.is_err());
        assert!(report.rows[2].outcome.is_ok() && report.rows[3].outcome.is_ok());
        assert_eq!(report.first_failure().unwrap().method, Method::Sf);
        assert_eq!(mean_rows(&report)[0].cells, 1);
    }

    #[test]
    fn overrides_replace_dimensions() {
        let mut config = BenchConfig::new(vec![Method::Sf], vec![small(SignalKind::Sinusoidal)]);
        config.space_overrides.push((
            Method::Sf,
            Dimension::new("threshold", Domain::Real { low: 0.5, high: 0.6, scale: crate::optimizer::Scale::Linear }),
        ));
        config.n_trials = 5;
        config.repeats = 1;
        let report = run_benchmark(&config).unwrap();
        let ConverterParams::Sf(p) = report.rows[0].metrics().unwrap().best_params else { panic!() };
        assert!((0.5..=0.6).contains(&p.threshold));

        config.space_overrides[0].1.name = "gain".into();
        assert!(run_benchmark(&config).unwrap().rows[0].outcome.is_err());
    }

    #[test]
    fn median_timing_is_positive() {
        let signal = generate(&small(SignalKind::Sinusoidal)).unwrap();
        let p = ConverterParams::Sf(crate::encoders::SfParams::new(0.1).unwrap());
        assert!(time_encode(&p, &signal, 5).unwrap() > Duration::ZERO);
        assert!(time_encode(&p, &signal, 0).is_err());
    }
}
