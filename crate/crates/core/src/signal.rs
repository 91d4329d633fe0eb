//! Signal and spike-train value types, normalization and error metrics.
//!
//! Normalization is an affine map `y = (x - offset) / scale` whose parameters
//! are kept in a [`NormalizationRecord`] so that decoders can map
//! reconstructions back into the units of the original signal.

use std::ops::Deref;

use crate::error::{Error, Result};

/// A finite, non-empty sequence of amplitudes sampled at unit intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.samples
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max - min`.
    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Population variance (divides by `n`).
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / self.samples.len() as f64
    }

    pub(crate) fn is_constant(&self) -> bool {
        let first = self.samples[0];
        self.samples.iter().all(|&x| x == first)
    }
}

impl Deref for Signal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.samples
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = Error;

    fn try_from(samples: Vec<f64>) -> Result<Self> {
        Signal::new(samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Values in {-1, 0, +1}.
    Bipolar,
    /// Values in {0, +1}.
    Unipolar,
}

/// Per-step spike events, one entry per sample of the encoded signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeTrain {
    spikes: Vec<i8>,
    polarity: Polarity,
}

impl SpikeTrain {
    pub fn new(spikes: Vec<i8>, polarity: Polarity) -> Result<Self> {
        let allowed: &[i8] = match polarity {
            Polarity::Bipolar => &[-1, 0, 1],
            Polarity::Unipolar => &[0, 1],
        };
        if let Some((t, s)) = spikes.iter().enumerate().find(|(_, s)| !allowed.contains(s)) {
            return Err(Error::InvalidParams(format!(
                "spike value {s} at index {t} not allowed in a {polarity:?} train"
            )));
        }
        Ok(Self { spikes, polarity })
    }

    pub fn bipolar(spikes: Vec<i8>) -> Result<Self> {
        Self::new(spikes, Polarity::Bipolar)
    }

    pub fn unipolar(spikes: Vec<i8>) -> Result<Self> {
        Self::new(spikes, Polarity::Unipolar)
    }

    /// Encoders build trains whose value domain is guaranteed by construction.
    pub(crate) fn from_raw(spikes: Vec<i8>, polarity: Polarity) -> Self {
        debug_assert!(Self::new(spikes.clone(), polarity).is_ok());
        Self { spikes, polarity }
    }

    pub fn spikes(&self) -> &[i8] {
        &self.spikes
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }

    pub fn spike_count(&self) -> usize {
        self.spikes.iter().filter(|&&s| s != 0).count()
    }

    /// Negates every event. The result is always bipolar.
    pub fn flipped(&self) -> Self {
        Self { spikes: self.spikes.iter().map(|s| -s).collect(), polarity: Polarity::Bipolar }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    MinMax,
    ZScore,
}

/// Parameters of the affine map `normalized = (x - offset) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRecord {
    pub kind: NormKind,
    pub offset: f64,
    pub scale: f64,
}

impl NormalizationRecord {
    pub fn new(kind: NormKind, offset: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite() && offset.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "normalization record needs finite offset and positive scale (offset {offset}, scale {scale})"
            )));
        }
        Ok(Self { kind, offset, scale })
    }

    /// Record that leaves values unchanged; used to feed already-normalized data.
    pub fn identity(kind: NormKind) -> Self {
        Self { kind, offset: 0.0, scale: 1.0 }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        (x - self.offset) / self.scale
    }

    #[inline]
    pub fn invert(&self, y: f64) -> f64 {
        y * self.scale + self.offset
    }
}

/// Rescales to `[0, 1]`.
pub fn min_max_normalize(signal: &Signal) -> Result<(Signal, NormalizationRecord)> {
    if signal.is_constant() {
        return Err(Error::DegenerateSignal("constant signal has zero range"));
    }
    let (min, max) = (signal.min(), signal.max());
    let record = NormalizationRecord::new(NormKind::MinMax, min, max - min)?;
    let samples = signal.iter().map(|&x| record.apply(x).clamp(0.0, 1.0)).collect();
    Ok((Signal { samples }, record))
}

/// Shifts and scales to zero mean and unit population variance.
pub fn zscore_normalize(signal: &Signal) -> Result<(Signal, NormalizationRecord)> {
    if signal.len() < 2 || signal.is_constant() {
        return Err(Error::DegenerateSignal("zero variance"));
    }
    let mean = signal.mean();
    let std = signal.variance().sqrt();
    let record = NormalizationRecord::new(NormKind::ZScore, mean, std)?;
    let samples = signal.iter().map(|&x| record.apply(x)).collect();
    Ok((Signal { samples }, record))
}

pub fn denormalize(signal: &[f64], record: &NormalizationRecord) -> Signal {
    Signal { samples: signal.iter().map(|&y| record.invert(y)).collect() }
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptySignal);
    }
    Ok(())
}

/// Mean squared error between two equal-length sequences.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    let total: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    Ok(total / a.len() as f64)
}

/// Prefix means of the squared error; the last element equals [`mse`].
pub fn running_mse(a: &[f64], b: &[f64]) -> Result<Signal> {
    check_lengths(a, b)?;
    let mut total = 0.0;
    let samples = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(t, (x, y))| {
            total += (x - y).powi(2);
            total / (t + 1) as f64
        })
        .collect();
    Ok(Signal { samples })
}

/// Fraction of time steps carrying a nonzero event, in `[0, 1]`.
pub fn sparsity(train: &SpikeTrain) -> f64 {
    if train.is_empty() {
        return 0.0;
    }
    train.spike_count() as f64 / train.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} != {b:?}");
        }
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(Signal::new(vec![]), Err(Error::EmptySignal));
        assert!(matches!(Signal::new(vec![0.0, f64::NAN]), Err(Error::NonFinite { index: 1, .. })));
        assert!(Signal::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn min_max_examples() {
        let (n, rec) = min_max_normalize(&sig(&[0.0, 5.0, 10.0])).unwrap();
        assert_close(&n, &[0.0, 0.5, 1.0], 0.0);
        assert_eq!((rec.offset, rec.scale), (0.0, 10.0));

        let (n, _) = min_max_normalize(&sig(&[-1.0, 0.0, 1.0, 3.0])).unwrap();
        assert_close(&n, &[0.0, 0.25, 0.5, 1.0], 1e-15);

        assert!(matches!(min_max_normalize(&sig(&[3.0, 3.0, 3.0])), Err(Error::DegenerateSignal(_))));
    }

    #[test]
    fn zscore_examples() {
        let (n, _) = zscore_normalize(&sig(&[1.0, -1.0])).unwrap();
        assert_close(&n, &[1.0, -1.0], 1e-12);

        let (n, rec) = zscore_normalize(&sig(&[0.0, 2.0])).unwrap();
        assert_close(&n, &[-1.0, 1.0], 1e-12);
        assert_eq!((rec.offset, rec.scale), (1.0, 1.0));

        assert!(matches!(zscore_normalize(&sig(&[2.0, 2.0, 2.0])), Err(Error::DegenerateSignal(_))));
        assert!(zscore_normalize(&sig(&[2.0])).is_err());
    }

    #[test]
    fn denormalize_examples() {
        let rec = NormalizationRecord::new(NormKind::MinMax, 0.0, 10.0).unwrap();
        assert_close(&denormalize(&[0.0, 0.5, 1.0], &rec), &[0.0, 5.0, 10.0], 0.0);

        let rec = NormalizationRecord::new(NormKind::ZScore, 1.0, 1.0).unwrap();
        assert_close(&denormalize(&[-1.0, 1.0], &rec), &[0.0, 2.0], 0.0);

        let rec = NormalizationRecord::new(NormKind::ZScore, -3.5, 0.25).unwrap();
        let back = denormalize(&[0.7], &rec);
        assert!((rec.apply(back[0]) - 0.7).abs() < 1e-9);
    }

    #[test]
    fn record_rejects_bad_scale() {
        assert!(NormalizationRecord::new(NormKind::MinMax, 0.0, 0.0).is_err());
        assert!(NormalizationRecord::new(NormKind::MinMax, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[0.0, 3.0], &[0.0, 0.0]).unwrap(), 4.5);
        assert_eq!(mse(&[0.0], &[0.0, 1.0]), Err(Error::LengthMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn running_mse_examples() {
        assert_close(&running_mse(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), &[0.0, 0.0], 0.0);
        assert_close(&running_mse(&[0.0, 3.0], &[0.0, 0.0]).unwrap(), &[0.0, 4.5], 0.0);
        let a = [0.3, -1.2, 4.0, 2.5, 0.0];
        let b = [1.0, 0.2, 3.3, -2.0, 0.1];
        let run = running_mse(&a, &b).unwrap();
        assert!((run[4] - mse(&a, &b).unwrap()).abs() < 1e-15);
        assert!(running_mse(&a, &b[..2]).is_err());
    }

    #[test]
    fn sparsity_examples() {
        let t = SpikeTrain::bipolar(vec![0, 1, 0, -1]).unwrap();
        assert_eq!(sparsity(&t), 0.5);
        assert_eq!(sparsity(&SpikeTrain::bipolar(vec![0; 7]).unwrap()), 0.0);
        assert_eq!(sparsity(&SpikeTrain::unipolar(vec![1; 7]).unwrap()), 1.0);
        assert_eq!(sparsity(&t.flipped()), 0.5);
    }

    #[test]
    fn spike_train_domain_checks() {
        assert!(SpikeTrain::unipolar(vec![0, -1]).is_err());
        assert!(SpikeTrain::bipolar(vec![2]).is_err());
        assert!(SpikeTrain::bipolar(vec![-1, 0, 1]).is_ok());
    }
}
