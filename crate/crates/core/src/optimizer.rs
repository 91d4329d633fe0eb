//! Seeded random search over converter hyperparameters, minimizing reconstruction MSE.
//!
//! Trial `i` draws its parameters from ChaCha8 seeded with `seed` on stream
//! `i`, so the sample of a trial never depends on how many trials run or in
//! which order they are evaluated. A run with more trials therefore extends
//! the trial log of a shorter run with the same seed.

use rayon::prelude::*;

use crate::encoders::{ConverterParams, Method, ParamKind, ParamValue};
use crate::error::{Error, Result};
use crate::generators::Prng;
use crate::signal::Signal;

pub const DEFAULT_TRIALS: usize = 500;
/// BSA gets a larger random-search budget.
pub const DEFAULT_BSA_TRIALS: usize = 1000;

pub fn default_trials(method: Method) -> usize {
    match method {
        Method::Bsa => DEFAULT_BSA_TRIALS,
        _ => DEFAULT_TRIALS,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Uniform on `[low, high)`, or log-uniform when `scale` is `Log`.
    Real {
        low: f64,
        high: f64,
        scale: Scale,
    },
    /// Uniform on `low..=high`, or log-uniform over the same integers.
    Int {
        low: i64,
        high: i64,
        scale: Scale,
    },
    Choice(Vec<ParamValue>),
}

impl Domain {
    fn validate(&self, name: &str) -> Result<()> {
        let fail = |msg: String| Err(Error::EmptySpace(format!("{name}: {msg}")));
        match *self {
            Domain::Real { low, high, scale } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return fail(format!("need low < high, got [{low}, {high}]"));
                }
                if scale == Scale::Log && low <= 0.0 {
                    return fail("log scale needs a positive lower bound".into());
                }
            }
            Domain::Int { low, high, scale } => {
                if low >= high {
                    return fail(format!("need low < high, got [{low}, {high}]"));
                }
                if scale == Scale::Log && low <= 0 {
                    return fail("log scale needs a positive lower bound".into());
                }
            }
            Domain::Choice(ref choices) => {
                if choices.is_empty() {
                    return fail("empty choice set".into());
                }
            }
        }
        Ok(())
    }

    fn sample(&self, prng: &mut Prng) -> ParamValue {
        match *self {
            Domain::Real { low, high, scale } => {
                let u = prng.uniform();
                ParamValue::Real(match scale {
                    Scale::Linear => low + u * (high - low),
                    Scale::Log => (low.ln() + u * (high.ln() - low.ln())).exp().clamp(low, high),
                })
            }
            Domain::Int { low, high, scale } => {
                let u = prng.uniform();
                let value = match scale {
                    Scale::Linear => low + (u * (high - low + 1) as f64).floor() as i64,
                    Scale::Log => {
                        let (a, b) = ((low as f64).ln(), ((high + 1) as f64).ln());
                        (a + u * (b - a)).exp().floor() as i64
                    }
                };
                ParamValue::Int(value.clamp(low, high))
            }
            Domain::Choice(ref choices) => {
                let k = ((prng.uniform() * choices.len() as f64) as usize).min(choices.len() - 1);
                choices[k]
            }
        }
    }

    pub fn contains(&self, value: ParamValue) -> bool {
        match (self, value) {
            (&Domain::Real { low, high, .. }, ParamValue::Real(x)) => x >= low && x <= high,
            (&Domain::Int { low, high, .. }, ParamValue::Int(i)) => i >= low && i <= high,
            (Domain::Choice(choices), v) => choices.contains(&v),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub name: String,
    pub domain: Domain,
}

impl Dimension {
    pub fn new(name: impl Into<String>, domain: Domain) -> Self {
        Self { name: name.into(), domain }
    }
}

/// One domain per hyperparameter of a method, in the method's declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    method: Method,
    dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(method: Method, dims: Vec<Dimension>) -> Result<Self> {
        for (name, kind) in method.params() {
            let matching: Vec<&Dimension> = dims.iter().filter(|d| d.name == *name).collect();
            let [dim] = matching.as_slice() else {
                return Err(Error::EmptySpace(format!("{} needs exactly one dimension for '{name}'", method.label())));
            };
            dim.domain.validate(name)?;
            let kind_ok = match (&dim.domain, kind) {
                (Domain::Real { .. }, ParamKind::Real) | (Domain::Int { .. }, ParamKind::Int) => true,
                (Domain::Choice(c), _) => c.iter().all(|v| {
                    matches!(
                        (v, kind),
                        (ParamValue::Real(_), ParamKind::Real)
                            | (ParamValue::Int(_), ParamKind::Int | ParamKind::Real)
                            | (ParamValue::Bool(_), ParamKind::Bool)
                    )
                }),
                _ => false,
            };
            if !kind_ok {
                return Err(Error::EmptySpace(format!("'{name}' domain does not match a {kind:?} parameter")));
            }
        }
        if let Some(extra) = dims.iter().find(|d| method.param_kind(&d.name).is_none()) {
            return Err(Error::EmptySpace(format!("{} has no parameter '{}'", method.label(), extra.name)));
        }
        let mut dims = dims;
        let order = |d: &Dimension| method.params().iter().position(|(n, _)| *n == d.name);
        dims.sort_by_key(order);
        Ok(Self { method, dims })
    }

    /// A space containing exactly one parameter set.
    pub fn fixed(params: &ConverterParams) -> Self {
        let dims = params
            .to_pairs()
            .into_iter()
            .map(|(name, value)| Dimension::new(name, Domain::Choice(vec![value])))
            .collect();
        Self { method: params.method(), dims }
    }

    /// Default ranges; SF and PWM/BSA bounds adapt to the signal's range and length.
    pub fn default_for(method: Method, signal: &Signal) -> Self {
        let n = signal.len() as i64;
        let real = |low: f64, high: f64, scale: Scale| Domain::Real { low, high, scale };
        let int_or_fixed = |low: i64, high: i64, scale: Scale| {
            if high > low {
                Domain::Int { low, high, scale }
            } else {
                Domain::Choice(vec![ParamValue::Int(high.max(0))])
            }
        };
        let dims = match method {
            Method::Sf => {
                let range = signal.range();
                let range = if range > 0.0 { range } else { 1.0 };
                vec![Dimension::new("threshold", real(1e-3 * range, range, Scale::Linear))]
            }
            Method::Lif => vec![
                Dimension::new("threshold", real(0.01, 10.0, Scale::Log)),
                Dimension::new("membrane_constant", real(0.5, 1.0, Scale::Linear)),
            ],
            Method::Pwm => vec![
                Dimension::new("frequency", int_or_fixed(1, (n / 4).max(1), Scale::Log)),
                Dimension::new("downspike", Domain::Choice(vec![ParamValue::Bool(true), ParamValue::Bool(false)])),
            ],
            Method::Bsa => vec![
                Dimension::new("filter_order", int_or_fixed(2, 64.min(n - 1), Scale::Linear)),
                Dimension::new("filter_cutoff", real(0.01, 0.49, Scale::Linear)),
                Dimension::new("threshold", real(1e-3, 2.0, Scale::Log)),
            ],
        };
        Self { method, dims }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn dimension_mut(&mut self, name: &str) -> Option<&mut Dimension> {
        self.dims.iter_mut().find(|d| d.name == name)
    }

    pub(crate) fn sample(&self, prng: &mut Prng) -> Vec<(&str, ParamValue)> {
        self.dims.iter().map(|d| (d.name.as_str(), d.domain.sample(prng))).collect()
    }

    pub fn contains(&self, params: &ConverterParams) -> bool {
        params.method() == self.method
            && params.to_pairs().into_iter().all(|(name, value)| {
                self.dims.iter().any(|d| {
                    d.name == name
                        && (d.domain.contains(value)
                            || matches!(d.domain, Domain::Choice(_)) && d.domain.contains(coerce(value)))
                })
            })
    }
}

/// Integer choices may stand in for real parameters.
fn coerce(value: ParamValue) -> ParamValue {
    match value {
        ParamValue::Real(x) if x.fract() == 0.0 => ParamValue::Int(x as i64),
        v => v,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: usize,
    pub params: ConverterParams,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_params: ConverterParams,
    pub best_mse: f64,
    pub best_index: usize,
    pub trials: Vec<Trial>,
    pub seed: u64,
    pub n_trials: usize,
}

/// Random search; returns the earliest trial with the lowest MSE.
pub fn optimize(signal: &Signal, space: &SearchSpace, n_trials: usize, seed: u64) -> Result<OptimizationResult> {
    if n_trials == 0 {
        return Err(Error::EmptySpace("at least one trial is required".into()));
    }
    if signal.is_constant() {
        return Err(Error::DegenerateSignal("constant signal cannot be optimized for"));
    }
    let outcomes: Vec<Result<Trial>> = (0..n_trials)
        .into_par_iter()
        .map(|index| {
            let mut prng = Prng::with_stream(seed, index as u64);
            let params = ConverterParams::from_pairs(space.method(), space.sample(&mut prng))?;
            let mse = params.round_trip(signal)?.mse;
            Ok(Trial { index, params, mse })
        })
        .collect();
    let trials = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let best = trials.iter().fold(&trials[0], |best, t| if t.mse < best.mse { t } else { best });
    Ok(OptimizationResult {
        best_params: best.params,
        best_mse: best.mse,
        best_index: best.index,
        seed,
        n_trials,
        trials,
    })
}

/// Optimizes over the default space with the default budget for `method`.
pub fn optimize_default(method: Method, signal: &Signal, seed: u64) -> Result<OptimizationResult> {
    optimize(signal, &SearchSpace::default_for(method, signal), default_trials(method), seed)
}
