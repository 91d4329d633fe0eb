//! Gaussian receptive field population coding (encode only).

use crate::error::{invalid_params, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrfParams {
    pub num_bins: usize,
    pub value_min: f64,
    pub value_max: f64,
    /// Gaussian width as a multiple of the spacing between centers.
    pub width_scale: f64,
}

impl GrfParams {
    pub fn new(num_bins: usize, value_min: f64, value_max: f64, width_scale: f64) -> Result<Self> {
        let params = Self { num_bins, value_min, value_max, width_scale };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_bins < 2 {
            return Err(invalid_params("GRF needs at least 2 bins"));
        }
        if !(self.value_min.is_finite() && self.value_max.is_finite() && self.value_max > self.value_min) {
            return Err(invalid_params(format!("GRF value range [{}, {}] is empty", self.value_min, self.value_max)));
        }
        if !(self.width_scale > 0.0 && self.width_scale.is_finite()) {
            return Err(invalid_params("GRF width scale must be > 0"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.value_max - self.value_min) / (self.num_bins - 1) as f64
    }

    pub fn sigma(&self) -> f64 {
        self.width_scale * self.spacing()
    }

    pub fn centers(&self) -> Vec<f64> {
        let spacing = self.spacing();
        (0..self.num_bins).map(|i| self.value_min + i as f64 * spacing).collect()
    }
}

/// Graded response of every bin to a single value.
pub fn encode(value: f64, params: &GrfParams) -> Result<Vec<f64>> {
    params.validate()?;
    if !value.is_finite() {
        return Err(invalid_params("GRF input must be finite"));
    }
    let two_var = 2.0 * params.sigma().powi(2);
    Ok(params.centers().into_iter().map(|c| (-(value - c).powi(2) / two_var).exp()).collect())
}

/// Responses for each sample of a sequence, one row per sample.
pub fn encode_all(values: &[f64], params: &GrfParams) -> Result<Vec<Vec<f64>>> {
    values.iter().map(|&v| encode(v, params)).collect()
}
