//! Kolmogorov–Smirnov aggregation of p-values and pass-proportion bands.

use serde::{Deserialize, Serialize};

use super::PValue;
use crate::{Error, Result};

const MIN_SAMPLES: usize = 5;
const SERIES_CUTOFF: f64 = 1e-10;

/// Largest gap between the empirical CDF of `values` and Uniform(0, 1).
pub fn ks_statistic(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let above = (i + 1) as f64 / m - x;
            let below = x - i as f64 / m;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov survival function `Q_KS(t) = 2 Σ (−1)^(k−1) e^(−2k²t²)`.
///
/// Below `t = 1` the alternating series converges slowly, so the equivalent
/// theta-function form `1 − √(2π)/t Σ e^(−(2k−1)²π²/(8t²))` is used there.
pub fn kolmogorov_q(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.0 {
        let c = -std::f64::consts::PI.powi(2) / (8.0 * t * t);
        let mut sum = 0.0;
        for k in 1.. {
            let j = (2 * k - 1) as f64;
            let term = (c * j * j).exp();
            sum += term;
            if term < SERIES_CUTOFF {
                break;
            }
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / t * sum).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1.. {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        sum += sign * term;
        if term < SERIES_CUTOFF {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Final p-value for the uniformity of a collection of p-values, with the
/// small-sample scaling `t = D (√m + 0.12 + 0.11/√m)`.
pub fn ks_uniform(pvalues: &[PValue]) -> Result<PValue> {
    if pvalues.len() < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "KS aggregation needs at least {MIN_SAMPLES} p-values, got {}",
            pvalues.len()
        )));
    }
    if let Some(bad) = pvalues.iter().find(|p| !(0.0..=1.0).contains(&p.value)) {
        return Err(Error::domain(format!(
            "p-value {} outside [0, 1]",
            bad.value
        )));
    }
    let values: Vec<f64> = pvalues.iter().map(|p| p.value).collect();
    let d = ks_statistic(&values);
    let sqrt_m = (values.len() as f64).sqrt();
    let t = d * (sqrt_m + 0.12 + 0.11 / sqrt_m);
    Ok(PValue::new(pvalues[0].test_name.clone(), kolmogorov_q(t)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassProportion {
    pub proportion: f64,
    pub low: f64,
    pub high: f64,
}

impl PassProportion {
    pub fn within_band(&self) -> bool {
        self.low <= self.proportion && self.proportion <= self.high
    }
}

/// Fraction of p-values `≥ alpha`, with the band
/// `(1 − α) ± 3 √(α(1 − α)/m)` clipped to `[0, 1]`.
pub fn pass_proportion(pvalues: &[PValue], alpha: f64) -> Result<PassProportion> {
    let m = pvalues.len();
    if m < 10 {
        return Err(Error::domain(format!(
            "pass proportion needs at least 10 p-values, got {m}"
        )));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain(format!(
            "alpha must lie in (0, 0.5), got {alpha}"
        )));
    }
    let passed = pvalues.iter().filter(|p| p.value >= alpha).count();
    let half_width = 3.0 * (alpha * (1.0 - alpha) / m as f64).sqrt();
    Ok(PassProportion {
        proportion: passed as f64 / m as f64,
        low: (1.0 - alpha - half_width).max(0.0),
        high: (1.0 - alpha + half_width).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(values: &[f64]) -> Vec<PValue> {
        values.iter().map(|&v| PValue::new("t", v)).collect()
    }

    /// Direct alternating series, summed far past convergence.
    fn q_reference(t: f64) -> f64 {
        2.0 * (1..=2000)
            .map(|k| {
                let k = k as f64;
                let s = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
                s * (-2.0 * k * k * t * t).exp()
            })
            .sum::<f64>()
    }

    #[test]
    fn both_series_forms_agree() {
        for t in [0.3, 0.5, 0.8, 0.99, 1.0, 1.2, 2.0] {
            assert_abs_diff_eq!(kolmogorov_q(t), q_reference(t), epsilon = 1e-9);
        }
        assert_eq!(kolmogorov_q(0.0), 1.0);
        assert_abs_diff_eq!(kolmogorov_q(1.36), 0.0494, epsilon = 1e-3);
    }

    #[test]
    fn uniform_grid() {
        let grid: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        assert_abs_diff_eq!(ks_statistic(&grid), 0.05, epsilon = 1e-12);
        assert!(ks_uniform(&pv(&grid)).unwrap().value > 0.99);
    }

    #[test]
    fn piled_up_values() {
        let p = ks_uniform(&pv(&[0.999; 20])).unwrap();
        assert!(p.value < 1e-6);
        assert_eq!(p.test_name, "t");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ks_uniform(&pv(&[0.5; 4])).is_err());
        assert!(ks_uniform(&pv(&[0.5, 0.5, 0.5, 0.5, 1.5])).is_err());
        assert!(ks_uniform(&pv(&[0.5, 0.5, 0.5, 0.5, -0.1])).is_err());
    }

    #[test]
    fn monotone_in_d() {
        let mut prev = kolmogorov_q(0.2);
        for i in 1..140 {
            let q = kolmogorov_q(0.2 + i as f64 * 0.02);
            assert!(q < prev, "t = {}", 0.2 + i as f64 * 0.02);
            prev = q;
        }
    }

    #[test]
    fn pass_proportion_bands() {
        let r = pass_proportion(&pv(&vec![0.5; 920]), 0.01).unwrap();
        assert_abs_diff_eq!(r.low, 0.9801, epsilon = 1e-4);
        assert_abs_diff_eq!(r.high, 0.9999, epsilon = 1e-4);
        let r = pass_proportion(&pv(&vec![1.0; 100]), 0.01).unwrap();
        assert_eq!(r.proportion, 1.0);
        assert_abs_diff_eq!(r.low, 0.9601, epsilon = 1e-4);
        assert_eq!(r.high, 1.0);
        assert!(r.within_band());
        assert!(pass_proportion(&pv(&[0.5; 9]), 0.01).is_err());
        assert!(pass_proportion(&pv(&[0.5; 10]), 0.5).is_err());
        assert!(pass_proportion(&pv(&[0.5; 10]), 0.0).is_err());
    }
}
