//! Whole-stream metrics in the style of the ENT program, at bit granularity.

use serde::{Deserialize, Serialize};

use crate::bits::BitStream;
use crate::special::chi_square_sf;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiSquareMode {
    /// Two categories, one degree of freedom.
    #[default]
    Bits,
    /// 256 byte values, 255 degrees of freedom.
    Bytes,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntReport {
    pub bit_length: u64,
    pub entropy_bits_per_bit: f64,
    /// `100 · (1 − entropy)`, the size reduction an ideal coder could reach.
    pub optimum_compression_percent: f64,
    pub chi_square_mode: ChiSquareMode,
    pub chi_square_stat: f64,
    pub chi_square_exceed_prob: f64,
    pub arithmetic_mean: f64,
    pub monte_carlo_pi: f64,
    pub monte_carlo_pi_error_percent: f64,
    /// `None` for a constant stream, where the coefficient is undefined.
    pub serial_correlation: Option<f64>,
}

fn require(bits: &BitStream, min: u64, what: &str) -> Result<()> {
    if bits.len() < min {
        return Err(Error::domain(format!(
            "{what} needs at least {min} bits, got {}",
            bits.len()
        )));
    }
    Ok(())
}

/// Empirical binary entropy, with `0 · log 0 = 0`.
pub fn shannon_entropy_per_bit(bits: &BitStream) -> Result<f64> {
    require(bits, 1, "entropy")?;
    let n = bits.len() as f64;
    let p1 = bits.count_ones() as f64 / n;
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(h(p1) + h(1.0 - p1))
}

/// Chi-square of the 0/1 counts against an even split.
pub fn chi_square_bits(bits: &BitStream) -> Result<(f64, f64)> {
    require(bits, 100, "chi-square")?;
    let n = bits.len() as f64;
    let ones = bits.count_ones() as f64;
    let expected = n / 2.0;
    let stat = ((ones - expected).powi(2) + (n - ones - expected).powi(2)) / expected;
    Ok((stat, chi_square_sf(stat, 1.0)))
}

/// Chi-square of the 256 byte-value counts; partial trailing bytes are
/// ignored.
pub fn chi_square_bytes(bits: &BitStream) -> Result<(f64, f64)> {
    let whole = (bits.len() / 8) as usize;
    if whole < 256 {
        return Err(Error::domain(
            "byte chi-square needs at least 256 whole bytes",
        ));
    }
    let mut counts = [0u64; 256];
    for &b in &bits.as_bytes()[..whole] {
        counts[b as usize] += 1;
    }
    let expected = whole as f64 / 256.0;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    Ok((stat, chi_square_sf(stat, 255.0)))
}

pub fn arithmetic_mean(bits: &BitStream) -> Result<f64> {
    require(bits, 1, "arithmetic mean")?;
    Ok(bits.count_ones() as f64 / bits.len() as f64)
}

fn read_u24(bits: &BitStream, start: u64) -> u64 {
    if start.is_multiple_of(8) {
        let i = (start / 8) as usize;
        let b = &bits.as_bytes()[i..i + 3];
        return (b[0] as u64) << 16 | (b[1] as u64) << 8 | b[2] as u64;
    }
    (start..start + 24).fold(0, |acc, i| acc << 1 | bits.get(i) as u64)
}

/// Monte Carlo estimate of π from successive 48-bit chunks read as two
/// 24-bit coordinates in `[0, 1)`. A point is inside when `x² + y² ≤ 1`.
pub fn monte_carlo_pi(bits: &BitStream) -> Result<(f64, u64)> {
    require(bits, 48, "Monte Carlo pi")?;
    let points = bits.len() / 48;
    const R2: u64 = 1 << 48;
    let inside = (0..points)
        .filter(|&k| {
            let x = read_u24(bits, 48 * k);
            let y = read_u24(bits, 48 * k + 24);
            x * x + y * y <= R2
        })
        .count() as u64;
    Ok((4.0 * inside as f64 / points as f64, points))
}

/// Lag-1 serial correlation with the last bit wrapped onto the first.
pub fn serial_correlation(bits: &BitStream) -> Result<f64> {
    require(bits, 2, "serial correlation")?;
    let n = bits.len();
    let ones = bits.count_ones();
    if ones == 0 || ones == n {
        return Err(Error::Computation(
            "serial correlation undefined for a constant stream".into(),
        ));
    }
    let mut adjacent = 0u64;
    let mut prev = bits.get(n - 1);
    for b in bits.iter() {
        adjacent += (prev & b) as u64;
        prev = b;
    }
    // x² = x for bits, so Σx² = Σx
    let n = n as f64;
    let sum = ones as f64;
    let num = n * adjacent as f64 - sum * sum;
    let den = n * sum - sum * sum;
    Ok(num / den)
}

pub fn ent_report(bits: &BitStream, mode: ChiSquareMode) -> Result<EntReport> {
    let entropy = shannon_entropy_per_bit(bits)?;
    let (chi_square_stat, chi_square_exceed_prob) = match mode {
        ChiSquareMode::Bits => chi_square_bits(bits)?,
        ChiSquareMode::Bytes => chi_square_bytes(bits)?,
    };
    let (pi, _) = monte_carlo_pi(bits)?;
    let serial = match serial_correlation(bits) {
        Ok(c) => Some(c),
        Err(Error::Computation(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(EntReport {
        bit_length: bits.len(),
        entropy_bits_per_bit: entropy,
        optimum_compression_percent: 100.0 * (1.0 - entropy),
        chi_square_mode: mode,
        chi_square_stat,
        chi_square_exceed_prob,
        arithmetic_mean: arithmetic_mean(bits)?,
        monte_carlo_pi: pi,
        monte_carlo_pi_error_percent: 100.0 * (pi - std::f64::consts::PI).abs()
            / std::f64::consts::PI,
        serial_correlation: serial,
    })
}
