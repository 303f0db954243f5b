use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ent::{ent_report, ChiSquareMode, EntReport};
use super::ks::{ks_uniform, pass_proportion, PassProportion};
use super::sts::{block_frequency, frequency_monobit, runs_test, BLOCK_FREQUENCY, MONOBIT, RUNS};
use super::PValue;
use crate::bits::BitStream;
use crate::{Error, Result};

pub const STS_TESTS: [&str; 3] = [MONOBIT, BLOCK_FREQUENCY, RUNS];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryOptions {
    pub alpha: f64,
    pub block_len: u64,
    pub chi_square: ChiSquareMode,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            block_len: 128,
            chi_square: ChiSquareMode::Bits,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub bit_length: u64,
    pub substream_bits: u64,
    pub substreams: usize,
    pub options: BatteryOptions,
    pub ent: EntReport,
    /// One row per substream, one entry per test in [`STS_TESTS`] order.
    pub sts_pvalues: Vec<Vec<PValue>>,
    /// Absent when there are too few substreams to aggregate.
    pub ks_final: BTreeMap<String, PValue>,
    pub pass_proportion: BTreeMap<String, PassProportion>,
}

impl BatteryReport {
    pub fn pvalues_for(&self, test: &str) -> Vec<PValue> {
        self.sts_pvalues
            .iter()
            .flat_map(|row| row.iter().filter(|p| p.test_name == test).cloned())
            .collect()
    }
}

pub fn run_battery(bits: &BitStream, substream_bits: u64) -> Result<BatteryReport> {
    run_battery_with(bits, substream_bits, &BatteryOptions::default())
}

/// ENT metrics on the whole stream, then the STS subset on every full
/// substream, aggregated per test.
pub fn run_battery_with(
    bits: &BitStream,
    substream_bits: u64,
    options: &BatteryOptions,
) -> Result<BatteryReport> {
    if substream_bits == 0 || bits.len() < substream_bits {
        return Err(Error::domain(format!(
            "stream of {} bits holds no full substream of {substream_bits} bits",
            bits.len()
        )));
    }
    let ent = ent_report(bits, options.chi_square)?;
    let substreams = (bits.len() / substream_bits) as usize;
    let sts_pvalues = (0..substreams)
        .into_par_iter()
        .map(|k| {
            let sub = bits.slice(k as u64 * substream_bits, substream_bits);
            Ok(vec![
                frequency_monobit(&sub)?,
                block_frequency(&sub, options.block_len)?,
                runs_test(&sub)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = BatteryReport {
        bit_length: bits.len(),
        substream_bits,
        substreams,
        options: *options,
        ent,
        sts_pvalues,
        ks_final: BTreeMap::new(),
        pass_proportion: BTreeMap::new(),
    };
    for test in STS_TESTS {
        let pvalues = report.pvalues_for(test);
        if let Ok(p) = ks_uniform(&pvalues) {
            report.ks_final.insert(test.to_string(), p);
        }
        if let Ok(pp) = pass_proportion(&pvalues, options.alpha) {
            report.pass_proportion.insert(test.to_string(), pp);
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Smallest acceptable KS-final p-value.
    pub min_ks_p: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { min_ks_p: 1e-4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Pass when every KS-final p-value clears `min_ks_p` and every pass
/// proportion lies in its band. Where a test has too few substreams to
/// aggregate, every one of its p-values must clear `alpha` instead.
pub fn evaluate(report: &BatteryReport, thresholds: &Thresholds) -> Verdict {
    let mut failures = Vec::new();
    for test in STS_TESTS {
        match report.ks_final.get(test) {
            Some(p) if p.value < thresholds.min_ks_p => failures.push(format!(
                "{test}: KS-final p = {:.6} < {}",
                p.value, thresholds.min_ks_p
            )),
            _ => {}
        }
        match report.pass_proportion.get(test) {
            Some(pp) if !pp.within_band() => failures.push(format!(
                "{test}: pass proportion {:.4} outside [{:.4}, {:.4}]",
                pp.proportion, pp.low, pp.high
            )),
            _ => {}
        }
        if !report.ks_final.contains_key(test) || !report.pass_proportion.contains_key(test) {
            let failing = report
                .pvalues_for(test)
                .iter()
                .filter(|p| p.value < report.options.alpha)
                .count();
            if failing > 0 {
                failures.push(format!(
                    "{test}: {failing} substream(s) below alpha = {}",
                    report.options.alpha
                ));
            }
        }
    }
    Verdict {
        passed: failures.is_empty(),
        failures,
    }
}
