//! Seeded synthesis of the four benchmark waveform classes.
//!
//! All waveforms are sampled at `t = 1..=n` with `u = t / n`, then z-normalized.
//!
//! * `sinusoidal`: `sin(2π · periods · u)`.
//! * `rectangular`: sign of the sinusoid, i.e. `+1` on even half-periods and
//!   `-1` on odd ones. The half-period index is computed in integer arithmetic
//!   (`2 · periods · t / n`) so zeros of the sine belong to the half-period
//!   they open.
//! * `trended`: `trend_slope · u + 0.5 sin(2π f₁ u + φ₁) + 0.3 sin(2π f₂ u + φ₂)`
//!   with `f₁ = periods / 2`, `f₂ = f₁ · √2`, plus white Gaussian noise.
//! * `vibration`: `Σ aₖ sin(2π · periods · mₖ · u + φₖ)` for
//!   `(mₖ, aₖ) ∈ {(5, 1.0), (13, 0.6), (29, 0.4)}`, plus white Gaussian noise.
//!
//! Randomness (phases `φ`, noise) comes from ChaCha8 seeded with
//! `seed_from_u64(seed)`. Uniforms are `(next_u64() >> 11) · 2⁻⁵³`; Gaussian
//! variates use the Marsaglia polar method on pairs of uniforms mapped to
//! `[-1, 1)`, rejecting pairs with `s = 0` or `s ≥ 1` and emitting the first
//! then the second coordinate of each accepted pair. Phases are drawn first,
//! noise afterwards, in time order.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::signal::{zscore_normalize, Signal};

pub const DEFAULT_LENGTH: usize = 16384;
pub const DEFAULT_PERIODS: u32 = 8;
pub const DEFAULT_NOISE_STD: f64 = 0.1;
pub const DEFAULT_TREND_SLOPE: f64 = 3.0;
pub const MIN_LENGTH: usize = 4;

const VIBRATION_COMPONENTS: [(f64, f64); 3] = [(5.0, 1.0), (13.0, 0.6), (29.0, 0.4)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignalKind {
    Vibration,
    Trended,
    Rectangular,
    Sinusoidal,
}

impl SignalKind {
    pub const ALL: [SignalKind; 4] =
        [SignalKind::Vibration, SignalKind::Trended, SignalKind::Rectangular, SignalKind::Sinusoidal];

    pub fn as_str(self) -> &'static str {
        match self {
            SignalKind::Vibration => "vibration",
            SignalKind::Trended => "trended",
            SignalKind::Rectangular => "rectangular",
            SignalKind::Sinusoidal => "sinusoidal",
        }
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SignalKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown signal kind '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: SignalKind,
    pub length: usize,
    pub seed: u64,
    /// Full periods of the base oscillation over the whole signal.
    pub periods: u32,
    pub noise_std: f64,
    pub trend_slope: f64,
}

impl GeneratorSpec {
    pub fn new(kind: SignalKind, seed: u64) -> Self {
        Self {
            kind,
            length: DEFAULT_LENGTH,
            seed,
            periods: DEFAULT_PERIODS,
            noise_std: DEFAULT_NOISE_STD,
            trend_slope: DEFAULT_TREND_SLOPE,
        }
    }

    pub fn with_length(mut self, length: usize) -> Self {
        self.length = length;
        self
    }

    pub fn with_periods(mut self, periods: u32) -> Self {
        self.periods = periods;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < MIN_LENGTH {
            return Err(Error::InvalidSpec(format!("length {} below minimum {MIN_LENGTH}", self.length)));
        }
        if self.periods == 0 {
            return Err(Error::InvalidSpec("periods must be at least 1".into()));
        }
        if 2 * self.periods as usize >= self.length {
            return Err(Error::InvalidSpec(format!(
                "{} periods cannot be resolved in {} samples",
                self.periods, self.length
            )));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::InvalidSpec(format!("noise_std {} must be >= 0", self.noise_std)));
        }
        if !self.trend_slope.is_finite() {
            return Err(Error::InvalidSpec("trend_slope must be finite".into()));
        }
        Ok(())
    }
}

/// Uniform and Gaussian draws with a fixed, documented derivation from ChaCha8.
pub(crate) struct Prng {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Prng {
    pub(crate) fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    pub(crate) fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub(crate) fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub(crate) fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * m);
                return u * m;
            }
        }
    }
}

/// Synthesizes a z-normalized waveform. Identical specs give bit-identical output.
pub fn generate(spec: &GeneratorSpec) -> Result<Signal> {
    spec.validate()?;
    let n = spec.length;
    let periods = spec.periods as f64;
    let mut prng = Prng::new(spec.seed);
    let phase = |t: usize, cycles: f64| 2.0 * PI * cycles * t as f64 / n as f64;

    let raw: Vec<f64> = match spec.kind {
        SignalKind::Sinusoidal => (1..=n).map(|t| phase(t, periods).sin()).collect(),
        SignalKind::Rectangular => (1..=n)
            .map(|t| {
                let half_period = 2 * spec.periods as usize * t / n;
                if half_period.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect(),
        SignalKind::Trended => {
            let phi1 = 2.0 * PI * prng.uniform();
            let phi2 = 2.0 * PI * prng.uniform();
            let f1 = periods / 2.0;
            let f2 = f1 * SQRT_2;
            (1..=n)
                .map(|t| {
                    let u = t as f64 / n as f64;
                    spec.trend_slope * u
                        + 0.5 * (phase(t, f1) + phi1).sin()
                        + 0.3 * (phase(t, f2) + phi2).sin()
                        + spec.noise_std * prng.gaussian()
                })
                .collect()
        }
        SignalKind::Vibration => {
            let phases: Vec<f64> = VIBRATION_COMPONENTS.iter().map(|_| 2.0 * PI * prng.uniform()).collect();
            (1..=n)
                .map(|t| {
                    let tone: f64 = VIBRATION_COMPONENTS
                        .iter()
                        .zip(&phases)
                        .map(|(&(mult, amp), phi)| amp * (phase(t, periods * mult) + phi).sin())
                        .sum();
                    tone + spec.noise_std * prng.gaussian()
                })
                .collect()
        }
    };

    let raw = Signal::new(raw).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let (normalized, _) =
        zscore_normalize(&raw).map_err(|e| Error::InvalidSpec(format!("waveform is degenerate: {e}")))?;
    Ok(normalized)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag1_autocorrelation(x: &[f64]) -> f64 {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        let cov: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        cov / var
    }

    fn assert_znormalized(x: &[f64]) {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 1e-9, "mean {mean}");
        assert!((var - 1.0).abs() < 1e-9, "variance {var}");
    }

    #[test]
    fn sinusoid_has_eight_periods() {
        let s = generate(&GeneratorSpec::new(SignalKind::Sinusoidal, 0)).unwrap();
        assert_eq!(s.len(), 16384);
        assert_znormalized(&s);
        // Direct DFT magnitude for bins 1..=32: the peak must sit at bin 8.
        let n = s.len() as f64;
        let power = |k: usize| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, x) in s.iter().enumerate() {
                let w = 2.0 * PI * k as f64 * t as f64 / n;
                re += x * w.cos();
                im -= x * w.sin();
            }
            re * re + im * im
        };
        let peak = (1..=32).max_by(|&a, &b| power(a).total_cmp(&power(b))).unwrap();
        assert_eq!(peak, 8);
    }

    #[test]
    fn rectangular_transitions_and_levels() {
        let spec = GeneratorSpec::new(SignalKind::Rectangular, 0).with_length(1000).with_periods(5);
        let s = generate(&spec).unwrap();
        let changes = s.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 10);
        let mut levels: Vec<f64> = s.to_vec();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        assert_eq!(levels.len(), 2);
        assert_znormalized(&s);
    }

    #[test]
    fn deterministic_per_seed() {
        for kind in SignalKind::ALL {
            let spec = GeneratorSpec::new(kind, 42).with_length(2048);
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
            assert_znormalized(&a);
        }
        let a = generate(&GeneratorSpec::new(SignalKind::Vibration, 1)).unwrap();
        let b = generate(&GeneratorSpec::new(SignalKind::Vibration, 2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn trend_has_positive_slope() {
        for seed in 0..10 {
            let s = generate(&GeneratorSpec::new(SignalKind::Trended, seed)).unwrap();
            let n = s.len() as f64;
            let tm = (n + 1.0) / 2.0;
            let slope_num: f64 = s.iter().enumerate().map(|(i, x)| (i as f64 + 1.0 - tm) * x).sum();
            assert!(slope_num > 0.0);
        }
    }

    #[test]
    fn vibration_is_less_regular_than_sinusoid() {
        let sine = generate(&GeneratorSpec::new(SignalKind::Sinusoidal, 3)).unwrap();
        let vib = generate(&GeneratorSpec::new(SignalKind::Vibration, 3)).unwrap();
        assert!(lag1_autocorrelation(&vib) < lag1_autocorrelation(&sine));
    }

    #[test]
    fn invalid_specs() {
        let bad_len = GeneratorSpec::new(SignalKind::Sinusoidal, 0).with_length(3);
        assert!(matches!(generate(&bad_len), Err(Error::InvalidSpec(_))));
        let no_periods = GeneratorSpec::new(SignalKind::Sinusoidal, 0).with_periods(0);
        assert!(generate(&no_periods).is_err());
        let aliased = GeneratorSpec::new(SignalKind::Rectangular, 0).with_length(16).with_periods(8);
        assert!(generate(&aliased).is_err());
        let mut noisy = GeneratorSpec::new(SignalKind::Vibration, 0);
        noisy.noise_std = -0.1;
        assert!(generate(&noisy).is_err());
        assert!("square".parse::<SignalKind>().is_err());
        assert_eq!("Trended".parse::<SignalKind>().unwrap(), SignalKind::Trended);
    }

    #[test]
    fn gaussian_moments() {
        let mut prng = Prng::new(9);
        let draws: Vec<f64> = (0..200_000).map(|_| prng.gaussian()).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.02);
    }
}
