use std::f64::consts::PI;

use crate::error::{invalid_params, Result};

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Hamming-windowed sinc lowpass with unit DC gain.
///
/// `cutoff` is in cycles per sample (sampling frequency 1), so it must lie
/// strictly between 0 and the Nyquist frequency 0.5.
pub fn fir_lowpass(filter_size: usize, cutoff: f64) -> Result<Vec<f64>> {
    if filter_size == 0 {
        return Err(invalid_params("filter size must be at least 1"));
    }
    if !(cutoff > 0.0 && cutoff < 0.5) {
        return Err(invalid_params(format!("filter cutoff {cutoff} must lie in (0, 0.5)")));
    }
    if filter_size == 1 {
        return Ok(vec![1.0]);
    }
    let order = (filter_size - 1) as f64;
    let taps: Vec<f64> = (0..filter_size)
        .map(|k| {
            let k = k as f64;
            let window = 0.54 - 0.46 * (2.0 * PI * k / order).cos();
            2.0 * cutoff * sinc(2.0 * cutoff * (k - order / 2.0)) * window
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return Err(invalid_params(format!(
            "filter (size {filter_size}, cutoff {cutoff}) has no DC gain to normalize"
        )));
    }
    Ok(taps.into_iter().map(|h| h / sum).collect())
}
