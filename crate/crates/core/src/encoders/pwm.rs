//! Pulse-width modulation against a rising sawtooth carrier.
//!
//! `carrier(t) = frac(frequency · (t - 1) / n)` for `t = 1..=n`, evaluated in
//! integer arithmetic, and `neg_carrier = 1 - carrier`. A level of `+1` marks
//! `signal < carrier`, `-1` marks `signal > neg_carrier` (only with
//! `downspike`), and spikes fire on transitions into either level.
//!
//! Decoding places an anchor at every spike (the carrier value for up-spikes,
//! the complementary carrier for down-spikes) and interpolates linearly
//! between anchors, holding the first and last anchor values at the edges.
//! Without any spike the reconstruction is the normalized midpoint 0.5.

use crate::error::{invalid_params, Result};
use crate::signal::{denormalize, min_max_normalize, NormalizationRecord, Polarity, Signal, SpikeTrain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PwmParams {
    /// Carrier periods over the whole signal.
    pub frequency: usize,
    pub downspike: bool,
}

impl PwmParams {
    pub fn new(frequency: usize, downspike: bool) -> Result<Self> {
        let params = Self { frequency, downspike };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequency == 0 {
            return Err(invalid_params("PWM frequency must be at least 1"));
        }
        Ok(())
    }

    fn validate_for(&self, len: usize) -> Result<()> {
        self.validate()?;
        if self.frequency > len / 2 {
            return Err(invalid_params(format!(
                "PWM frequency {} exceeds half the signal length {len}",
                self.frequency
            )));
        }
        Ok(())
    }
}

pub fn carrier(len: usize, frequency: usize) -> Vec<f64> {
    (0..len).map(|i| (i * frequency % len) as f64 / len as f64).collect()
}

/// Encodes a signal already scaled to `[0, 1]`.
pub fn encode_normalized(signal: &[f64], params: &PwmParams) -> Result<SpikeTrain> {
    let n = signal.len();
    params.validate_for(n)?;
    let carrier = carrier(n, params.frequency);
    let neg_carrier: Vec<f64> = carrier.iter().map(|c| 1.0 - c).collect();

    let pwm: Vec<i8> = signal
        .iter()
        .zip(carrier.iter().zip(&neg_carrier))
        .map(|(&x, (&c, &nc))| {
            if x < c {
                1
            } else if params.downspike && x > nc {
                -1
            } else {
                0
            }
        })
        .collect();

    let mut spikes = vec![0i8; n];
    for t in 1..n {
        let (prev, cur) = (pwm[t - 1], pwm[t]);
        if cur == 1 && prev != 1 {
            spikes[t] = 1;
        } else if cur == -1 && prev != -1 {
            spikes[t] = -1;
        }
    }
    Ok(SpikeTrain::from_raw(spikes, Polarity::Bipolar))
}

pub fn encode(signal: &Signal, params: &PwmParams) -> Result<(SpikeTrain, NormalizationRecord)> {
    params.validate_for(signal.len())?;
    let (normalized, record) = min_max_normalize(signal)?;
    Ok((encode_normalized(&normalized, params)?, record))
}

pub fn decode(spikes: &SpikeTrain, params: &PwmParams, record: &NormalizationRecord) -> Result<Signal> {
    let n = spikes.len();
    params.validate_for(n)?;
    let carrier = carrier(n, params.frequency);
    let anchors: Vec<(usize, f64)> = spikes
        .spikes()
        .iter()
        .enumerate()
        .filter_map(|(t, &s)| match s {
            1 => Some((t, carrier[t])),
            -1 => Some((t, 1.0 - carrier[t])),
            _ => None,
        })
        .collect();

    let mut unit = vec![0.5; n];
    if let (Some(&(first_t, first_v)), Some(&(last_t, last_v))) = (anchors.first(), anchors.last()) {
        unit[..first_t].fill(first_v);
        for pair in anchors.windows(2) {
            let ((t0, v0), (t1, v1)) = (pair[0], pair[1]);
            let span = (t1 - t0) as f64;
            for (k, slot) in unit[t0..t1].iter_mut().enumerate() {
                *slot = v0 + (v1 - v0) * k as f64 / span;
            }
        }
        unit[last_t..].fill(last_v);
    }
    Ok(denormalize(&unit, record))
}
