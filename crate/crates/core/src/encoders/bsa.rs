//! Ben's Spiker Algorithm with the subtractive threshold.
//!
//! The min-max normalized signal is modelled as a unipolar spike train
//! convolved with a lowpass FIR filter. A spike is emitted at `t` when
//! subtracting the filter there lowers the absolute residual by at least
//! `threshold`; the filter is then subtracted from a working copy. Windows
//! near the end of the signal are truncated. Decoding is the forward
//! convolution of the spike train with the same filter.

use super::fir::fir_lowpass;
use crate::error::{invalid_params, Result};
use crate::signal::{denormalize, min_max_normalize, NormalizationRecord, Polarity, Signal, SpikeTrain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsaParams {
    pub filter_order: usize,
    /// Cycles per sample, in `(0, 0.5)`.
    pub filter_cutoff: f64,
    pub threshold: f64,
}

impl BsaParams {
    pub fn new(filter_order: usize, filter_cutoff: f64, threshold: f64) -> Result<Self> {
        let params = Self { filter_order, filter_cutoff, threshold };
        params.validate()?;
        Ok(params)
    }

    pub fn filter_size(&self) -> usize {
        self.filter_order + 1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.filter_cutoff > 0.0 && self.filter_cutoff < 0.5) {
            return Err(invalid_params(format!("BSA cutoff {} must lie in (0, 0.5)", self.filter_cutoff)));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(invalid_params(format!("BSA threshold {} must be > 0", self.threshold)));
        }
        Ok(())
    }

    fn validate_for(&self, len: usize) -> Result<()> {
        self.validate()?;
        if self.filter_size() > len {
            return Err(invalid_params(format!("BSA filter size {} exceeds signal length {len}", self.filter_size())));
        }
        Ok(())
    }

    pub fn filter(&self) -> Result<Vec<f64>> {
        fir_lowpass(self.filter_size(), self.filter_cutoff)
    }
}

/// Encodes a signal already scaled to `[0, 1]`. The input is not modified.
pub fn encode_normalized(signal: &[f64], params: &BsaParams) -> Result<SpikeTrain> {
    params.validate_for(signal.len())?;
    let fir = params.filter()?;
    let mut residual = signal.to_vec();
    let n = residual.len();
    let mut spikes = vec![0i8; n];
    for t in 0..n {
        let end = (t + fir.len()).min(n);
        let window = &mut residual[t..end];
        let (mut err1, mut err2) = (0.0, 0.0);
        for (x, h) in window.iter().zip(&fir) {
            err1 += (x - h).abs();
            err2 += x.abs();
        }
        if err1 <= err2 - params.threshold {
            spikes[t] = 1;
            for (x, h) in window.iter_mut().zip(&fir) {
                *x -= h;
            }
        }
    }
    Ok(SpikeTrain::from_raw(spikes, Polarity::Unipolar))
}

pub fn encode(signal: &Signal, params: &BsaParams) -> Result<(SpikeTrain, NormalizationRecord)> {
    params.validate_for(signal.len())?;
    let (normalized, record) = min_max_normalize(signal)?;
    Ok((encode_normalized(&normalized, params)?, record))
}

/// `out(t) = Σ_{s ≤ t} spikes(s) · fir(t - s)`, truncated at the signal end.
pub fn convolve(spikes: &[i8], fir: &[f64]) -> Vec<f64> {
    let n = spikes.len();
    let mut out = vec![0.0; n];
    for (s, _) in spikes.iter().enumerate().filter(|(_, &v)| v != 0) {
        let weight = spikes[s] as f64;
        for (slot, h) in out[s..].iter_mut().zip(fir) {
            *slot += weight * h;
        }
    }
    out
}

pub fn decode(spikes: &SpikeTrain, params: &BsaParams, record: &NormalizationRecord) -> Result<Signal> {
    params.validate_for(spikes.len())?;
    let fir = params.filter()?;
    Ok(denormalize(&convolve(spikes.spikes(), &fir), record))
}
