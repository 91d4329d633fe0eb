//! Step-Forward encoding: an adaptive baseline that moves by one threshold per spike.

use crate::error::{invalid_params, Result};
use crate::signal::{Polarity, Signal, SpikeTrain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfParams {
    pub threshold: f64,
}

impl SfParams {
    pub fn new(threshold: f64) -> Result<Self> {
        let params = Self { threshold };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(invalid_params(format!("SF threshold {} must be > 0", self.threshold)));
        }
        Ok(())
    }
}

/// Encodes in raw amplitude units; the baseline starts at 0.
pub fn encode(signal: &[f64], params: &SfParams) -> Result<SpikeTrain> {
    params.validate()?;
    let threshold = params.threshold;
    let mut base = 0.0;
    let spikes = signal
        .iter()
        .map(|&x| {
            if x > base + threshold {
                base += threshold;
                1
            } else if x < base - threshold {
                base -= threshold;
                -1
            } else {
                0
            }
        })
        .collect();
    Ok(SpikeTrain::from_raw(spikes, Polarity::Bipolar))
}

/// `initial_value + threshold · Σ spikes[..=t]`.
pub fn decode(spikes: &SpikeTrain, params: &SfParams, initial_value: f64) -> Result<Signal> {
    params.validate()?;
    if !initial_value.is_finite() {
        return Err(invalid_params("SF initial value must be finite"));
    }
    let mut level: i64 = 0;
    let samples = spikes
        .spikes()
        .iter()
        .map(|&s| {
            level += s as i64;
            initial_value + params.threshold * level as f64
        })
        .collect();
    Signal::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traces_readme_signal() {
        let p = SfParams::new(0.15).unwrap();
        let t = encode(&[0.1, 0.3, 0.2, 0.4, 0.8], &p).unwrap();
        assert_eq!(t.spikes(), &[0, 1, 0, 1, 1]);
        let r = decode(&t, &p, 0.0).unwrap();
        let expected = [0.0, 0.15, 0.15, 0.30, 0.45];
        for (a, b) in r.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_signal_is_silent() {
        let t = encode(&[0.0; 32], &SfParams::new(0.01).unwrap()).unwrap();
        assert_eq!(t.spike_count(), 0);
    }

    #[test]
    fn steep_ramp_spikes_every_step_after_first() {
        let theta = 0.25;
        let ramp: Vec<f64> = (0..20).map(|i| 2.0 * theta * i as f64).collect();
        let t = encode(&ramp, &SfParams::new(theta).unwrap()).unwrap();
        assert_eq!(t.spikes()[0], 0);
        assert!(t.spikes()[1..].iter().all(|&s| s == 1));
    }

    #[test]
    fn decode_constant_and_cancellation() {
        let p = SfParams::new(0.4).unwrap();
        let silent = SpikeTrain::bipolar(vec![0; 5]).unwrap();
        assert!(decode(&silent, &p, 1.5).unwrap().iter().all(|&x| x == 1.5));
        let pair = SpikeTrain::bipolar(vec![1, -1]).unwrap();
        assert_eq!(decode(&pair, &p, 0.0).unwrap().samples(), &[0.4, 0.0]);
    }

    #[test]
    fn rejects_bad_threshold() {
        assert!(SfParams::new(0.0).is_err());
        assert!(SfParams::new(-1.0).is_err());
        assert!(encode(&[1.0], &SfParams { threshold: f64::NAN }).is_err());
    }
}
