//! Frequency (monobit), block frequency and runs tests.
//!
//! The `*_pvalue` functions are the bare closed forms over sufficient
//! statistics; the stream-level entry points enforce minimum lengths.

use super::PValue;
use crate::bits::BitStream;
use crate::special::{erfc, gamma_q};
use crate::{Error, Result};

pub const MONOBIT: &str = "frequency_monobit";
pub const BLOCK_FREQUENCY: &str = "block_frequency";
pub const RUNS: &str = "runs";

const MIN_BITS: u64 = 100;
const MIN_BLOCK_LEN: u64 = 20;

fn require_len(bits: &BitStream, test: &str) -> Result<()> {
    if bits.len() < MIN_BITS {
        return Err(Error::domain(format!(
            "{test} needs at least {MIN_BITS} bits, got {}",
            bits.len()
        )));
    }
    Ok(())
}

/// `erfc(|2·ones − n| / √(2n))`.
pub fn monobit_pvalue(n: u64, ones: u64) -> f64 {
    let s = (2.0 * ones as f64 - n as f64).abs() / (n as f64).sqrt();
    erfc(s / std::f64::consts::SQRT_2)
}

pub fn frequency_monobit(bits: &BitStream) -> Result<PValue> {
    require_len(bits, MONOBIT)?;
    Ok(PValue::new(
        MONOBIT,
        monobit_pvalue(bits.len(), bits.count_ones()),
    ))
}

/// `Q(N/2, χ²/2)` with `χ² = 4M Σ (πᵢ − ½)²` over per-block one counts.
pub fn block_frequency_pvalue(block_ones: &[u64], block_len: u64) -> f64 {
    let m = block_len as f64;
    let chi2 = 4.0
        * m
        * block_ones
            .iter()
            .map(|&c| (c as f64 / m - 0.5).powi(2))
            .sum::<f64>();
    gamma_q(block_ones.len() as f64 / 2.0, chi2 / 2.0)
}

pub fn block_frequency(bits: &BitStream, block_len: u64) -> Result<PValue> {
    require_len(bits, BLOCK_FREQUENCY)?;
    if block_len < MIN_BLOCK_LEN {
        return Err(Error::domain(format!(
            "block length must be at least {MIN_BLOCK_LEN}, got {block_len}"
        )));
    }
    let blocks = bits.len() / block_len;
    if blocks == 0 {
        return Err(Error::domain("stream shorter than one block"));
    }
    let counts: Vec<u64> = if block_len.is_multiple_of(8) {
        let bytes = (block_len / 8) as usize;
        bits.as_bytes()
            .chunks_exact(bytes)
            .take(blocks as usize)
            .map(|c| c.iter().map(|b| b.count_ones() as u64).sum())
            .collect()
    } else {
        (0..blocks)
            .map(|k| {
                (k * block_len..(k + 1) * block_len)
                    .filter(|&i| bits.get(i))
                    .count() as u64
            })
            .collect()
    };
    Ok(PValue::new(
        BLOCK_FREQUENCY,
        block_frequency_pvalue(&counts, block_len),
    ))
}

/// Runs p-value from length, ones and `V = transitions + 1`. Returns 0 when
/// the frequency prerequisite `|π − ½| < 2/√n` fails.
pub fn runs_pvalue(n: u64, ones: u64, runs: u64) -> f64 {
    let nf = n as f64;
    let pi = ones as f64 / nf;
    if (pi - 0.5).abs() >= 2.0 / nf.sqrt() {
        return 0.0;
    }
    let spread = pi * (1.0 - pi);
    erfc((runs as f64 - 2.0 * nf * spread).abs() / (2.0 * (2.0 * nf).sqrt() * spread))
}

fn count_runs(bits: &BitStream) -> u64 {
    let bytes = bits.as_bytes();
    let whole = (bits.len() / 8) as usize;
    let mut transitions = 0u64;
    for (i, &b) in bytes[..whole].iter().enumerate() {
        transitions += ((b ^ (b >> 1)) & 0x7F).count_ones() as u64;
        if i + 1 < whole {
            transitions += ((b & 1) ^ (bytes[i + 1] >> 7)) as u64;
        }
    }
    let tail_start = whole as u64 * 8;
    if tail_start < bits.len() {
        let from = tail_start.saturating_sub(1);
        for i in from..bits.len() - 1 {
            transitions += (bits.get(i) != bits.get(i + 1)) as u64;
        }
    }
    transitions + 1
}

pub fn runs_test(bits: &BitStream) -> Result<PValue> {
    require_len(bits, RUNS)?;
    Ok(PValue::new(
        RUNS,
        runs_pvalue(bits.len(), bits.count_ones(), count_runs(bits)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::pack_bits;
    use approx::assert_abs_diff_eq;

    fn pattern(unit: &[u8], len: usize) -> BitStream {
        pack_bits(&unit.iter().copied().cycle().take(len).collect::<Vec<_>>())
    }

    #[test]
    fn monobit_examples() {
        assert_eq!(
            frequency_monobit(&pattern(&[0, 1], 100)).unwrap().value,
            1.0
        );
        assert_abs_diff_eq!(monobit_pvalue(10, 6), 0.527089256865538, epsilon = 1e-12);
        let p = frequency_monobit(&pattern(&[1], 100)).unwrap().value;
        assert_abs_diff_eq!(p, erfc(50f64.sqrt()), epsilon = 1e-30);
        assert!(p < 1e-20);
        assert!(frequency_monobit(&pattern(&[1], 99)).is_err());
    }

    #[test]
    fn block_frequency_examples() {
        // 0110011010, M = 3: blocks 011, 001, 101
        assert_abs_diff_eq!(
            block_frequency_pvalue(&[2, 1, 2], 3),
            0.801251956901201,
            epsilon = 1e-12
        );
        let p = block_frequency(&pattern(&[0, 1], 1000), 20).unwrap();
        assert_eq!(p.value, 1.0);
        let p = block_frequency(&pattern(&[0, 0, 1, 1], 1024), 128).unwrap();
        assert_eq!(p.value, 1.0);
        assert!(block_frequency(&pattern(&[0, 1], 1000), 10).is_err());
        assert!(block_frequency(&pattern(&[0, 1], 100), 128).is_err());
    }

    #[test]
    fn block_frequency_unaligned_matches_aligned_counts() {
        let s = pattern(&[1, 1, 0, 1, 0, 0, 0], 700);
        let counts: Vec<u64> = (0..(700 / 25))
            .map(|k| (k * 25..(k + 1) * 25).filter(|&i| s.get(i)).count() as u64)
            .collect();
        assert_eq!(
            block_frequency(&s, 25).unwrap().value,
            block_frequency_pvalue(&counts, 25)
        );
    }

    #[test]
    fn runs_examples() {
        let s = pack_bits(&[1, 0, 0, 1, 1, 0, 1, 0, 1, 1]);
        assert_eq!(count_runs(&s), 7);
        assert_abs_diff_eq!(runs_pvalue(10, 6, 7), 0.147232, epsilon = 1e-6);
        let p = runs_test(&pattern(&[0, 1], 100)).unwrap().value;
        assert!(p < 1e-20, "p = {p}");
        assert_eq!(runs_test(&pattern(&[1], 100)).unwrap().value, 0.0);
    }

    #[test]
    fn run_count_matches_naive() {
        for len in [100usize, 101, 107, 128, 333] {
            let s = pattern(&[1, 1, 0, 1, 0, 0, 0, 1, 1], len);
            let naive = 1
                + (0..len as u64 - 1)
                    .filter(|&i| s.get(i) != s.get(i + 1))
                    .count() as u64;
            assert_eq!(count_runs(&s), naive, "len {len}");
        }
    }
}
