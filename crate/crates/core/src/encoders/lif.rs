//! Leaky integrate-and-fire encoding.
//!
//! The input is min-max normalized and mapped to `[-1, 1]`, then integrated
//! into a membrane voltage that fires `±1` and resets on crossing
//! `±threshold`, and decays by `membrane_constant` after every step.
//!
//! Decoding treats each spike as an impulse of height `threshold` and smooths
//! the impulses with a causal moving average of width
//! `round(1 / (1 - membrane_constant + 1e-9))`, clamped to `[1, 64]`. Early
//! samples average over the steps seen so far. The estimate is clipped to
//! `[-1, 1]` before the normalization is undone.

use crate::error::{invalid_params, Result};
use crate::signal::{denormalize, min_max_normalize, NormalizationRecord, Polarity, Signal, SpikeTrain};

pub const MAX_WINDOW: usize = 64;
const WINDOW_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifParams {
    pub threshold: f64,
    pub membrane_constant: f64,
}

impl LifParams {
    pub fn new(threshold: f64, membrane_constant: f64) -> Result<Self> {
        let params = Self { threshold, membrane_constant };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(invalid_params(format!("LIF threshold {} must be > 0", self.threshold)));
        }
        if !(self.membrane_constant > 0.0 && self.membrane_constant <= 1.0) {
            return Err(invalid_params(format!("membrane constant {} must lie in (0, 1]", self.membrane_constant)));
        }
        Ok(())
    }

    pub fn smoothing_window(&self) -> usize {
        let w = (1.0 / (1.0 - self.membrane_constant + WINDOW_EPS)).round();
        (w.min(MAX_WINDOW as f64) as usize).max(1)
    }
}

/// Min-max normalizes and maps to `[-1, 1]`.
pub fn normalize(signal: &Signal) -> Result<(Vec<f64>, NormalizationRecord)> {
    let (unit, record) = min_max_normalize(signal)?;
    Ok((unit.iter().map(|x| x * 2.0 - 1.0).collect(), record))
}

#[inline]
fn integrate(signal: &[f64], params: &LifParams, mut observe: impl FnMut(f64)) -> Vec<i8> {
    let mut voltage = 0.0;
    signal
        .iter()
        .map(|&x| {
            voltage += x;
            observe(voltage);
            let spike = if voltage > params.threshold {
                voltage = 0.0;
                1
            } else if voltage < -params.threshold {
                voltage = 0.0;
                -1
            } else {
                0
            };
            voltage *= params.membrane_constant;
            spike
        })
        .collect()
}

/// Encodes a signal already mapped to `[-1, 1]`.
pub fn encode_normalized(signal: &[f64], params: &LifParams) -> Result<SpikeTrain> {
    params.validate()?;
    Ok(SpikeTrain::from_raw(integrate(signal, params, |_| {}), Polarity::Bipolar))
}

pub fn encode(signal: &Signal, params: &LifParams) -> Result<(SpikeTrain, NormalizationRecord)> {
    params.validate()?;
    let (normalized, record) = normalize(signal)?;
    Ok((encode_normalized(&normalized, params)?, record))
}

/// Membrane voltage right after integrating each sample (before reset and leak).
pub fn voltage_trace(signal: &[f64], params: &LifParams) -> Result<Vec<f64>> {
    params.validate()?;
    let mut trace = Vec::with_capacity(signal.len());
    integrate(signal, params, |v| trace.push(v));
    Ok(trace)
}

pub fn decode(spikes: &SpikeTrain, params: &LifParams, record: &NormalizationRecord) -> Result<Signal> {
    params.validate()?;
    let window = params.smoothing_window();
    let s = spikes.spikes();
    let mut running: i64 = 0;
    let bipolar: Vec<f64> = (0..s.len())
        .map(|t| {
            running += s[t] as i64;
            if t >= window {
                running -= s[t - window] as i64;
            }
            let span = (t + 1).min(window) as f64;
            (params.threshold * running as f64 / span).clamp(-1.0, 1.0)
        })
        .collect();
    let unit: Vec<f64> = bipolar.iter().map(|x| (x + 1.0) / 2.0).collect();
    Ok(denormalize(&unit, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::NormKind;

    #[test]
    fn alternating_signal_trace() {
        let s = Signal::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let (t, rec) = encode(&s, &LifParams::new(0.5, 1.0).unwrap()).unwrap();
        assert_eq!(t.spikes(), &[-1, 1, -1, 1]);
        assert_eq!((rec.offset, rec.scale), (0.0, 1.0));
    }

    #[test]
    fn high_threshold_is_silent_over_short_horizon() {
        let s = Signal::new([0.0, 1.0].repeat(4)).unwrap();
        let (t, _) = encode(&s, &LifParams::new(10.0, 1.0).unwrap()).unwrap();
        assert_eq!(t.spike_count(), 0);
    }

    #[test]
    fn first_spike_bound_for_positive_input() {
        let params = LifParams::new(2.3, 1.0).unwrap();
        let normalized: Vec<f64> = (0..50).map(|i| 0.2 + 0.01 * i as f64).collect();
        let t = encode_normalized(&normalized, &params).unwrap();
        let first = t.spikes().iter().position(|&s| s == 1).unwrap() + 1;
        // Every step adds at least 0.2, so the voltage exceeds 2.3 within 12 steps.
        assert!(first <= (2.3f64 / 0.2).floor() as usize + 1, "first spike at {first}");
    }

    #[test]
    fn window_width() {
        assert_eq!(LifParams::new(1.0, 1.0).unwrap().smoothing_window(), 64);
        assert_eq!(LifParams::new(1.0, 0.5).unwrap().smoothing_window(), 2);
        assert_eq!(LifParams::new(1.0, 0.9).unwrap().smoothing_window(), 10);
        assert_eq!(LifParams::new(1.0, 0.01).unwrap().smoothing_window(), 1);
    }

    #[test]
    fn decode_silence_is_midpoint() {
        let rec = NormalizationRecord::new(NormKind::MinMax, -2.0, 6.0).unwrap();
        let p = LifParams::new(0.7, 0.95).unwrap();
        let r = decode(&SpikeTrain::bipolar(vec![0; 9]).unwrap(), &p, &rec).unwrap();
        assert!(r.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn decode_monotone_in_spikes() {
        let rec = NormalizationRecord::identity(NormKind::MinMax);
        let p = LifParams::new(0.3, 0.9).unwrap();
        let silent = decode(&SpikeTrain::bipolar(vec![0; 9]).unwrap(), &p, &rec).unwrap();
        let mut spikes = vec![0; 9];
        spikes[4] = 1;
        let one = decode(&SpikeTrain::bipolar(spikes).unwrap(), &p, &rec).unwrap();
        assert!(one[4] > silent[4]);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LifParams::new(0.0, 0.5).is_err());
        assert!(LifParams::new(1.0, 0.0).is_err());
        assert!(LifParams::new(1.0, 1.01).is_err());
        let s = Signal::new(vec![1.0; 4]).unwrap();
        assert!(encode(&s, &LifParams::new(1.0, 1.0).unwrap()).is_err());
    }
}
