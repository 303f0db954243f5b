//! Statistical randomness battery: ENT-style whole-stream metrics, three
//! frequency/runs tests scored per substream, Kolmogorov–Smirnov aggregation
//! of p-values and pass-proportion bands.

mod battery;
pub mod ent;
pub mod ks;
pub mod sts;

use serde::{Deserialize, Serialize};

pub use battery::{
    evaluate, run_battery, run_battery_with, BatteryOptions, BatteryReport, Thresholds, Verdict,
    STS_TESTS,
};
pub use ent::{
    arithmetic_mean, chi_square_bits, chi_square_bytes, ent_report, monte_carlo_pi,
    serial_correlation, shannon_entropy_per_bit, ChiSquareMode, EntReport,
};
pub use ks::{kolmogorov_q, ks_statistic, ks_uniform, pass_proportion, PassProportion};
pub use sts::{block_frequency, frequency_monobit, runs_test};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub value: f64,
    pub test_name: String,
}

impl PValue {
    pub fn new(test_name: impl Into<String>, value: f64) -> Self {
        Self {
            value,
            test_name: test_name.into(),
        }
    }
}

/// Sample autocorrelation of a 0/1 sequence at `lag`, normalized by the
/// full-sequence variance.
pub fn lag_autocorrelation(values: &[bool], lag: usize) -> crate::Result<f64> {
    let n = values.len();
    if lag == 0 || n <= lag {
        return Err(crate::Error::Domain(format!(
            "lag {lag} needs a longer sequence than {n}"
        )));
    }
    let mean = values.iter().filter(|&&v| v).count() as f64 / n as f64;
    let var = mean * (1.0 - mean);
    if var == 0.0 {
        return Err(crate::Error::Computation("constant sequence".into()));
    }
    let x = |v: bool| v as u8 as f64 - mean;
    let cov = values
        .iter()
        .zip(&values[lag..])
        .map(|(&a, &b)| x(a) * x(b))
        .sum::<f64>()
        / (n - lag) as f64;
    Ok(cov / var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autocorrelation_of_patterns() {
        let alt: Vec<bool> = (0..1000).map(|i| i % 2 == 0).collect();
        assert!((lag_autocorrelation(&alt, 1).unwrap() + 1.0).abs() < 1e-9);
        assert!((lag_autocorrelation(&alt, 2).unwrap() - 1.0).abs() < 1e-9);
        assert!(lag_autocorrelation(&[true; 10], 1).is_err());
        assert!(lag_autocorrelation(&alt[..1], 1).is_err());
    }
}
