//! Run configuration and the flat `key=value` config file format.
//!
//! Keys mirror the command-line flag names without the leading dashes.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detector::DetectorConfig;
use crate::extractor::PairingMode;
use crate::source::SourceConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Packed bytes, no header.
    #[default]
    Raw,
    Hex,
    Base64,
    /// One `0`/`1` character per bit, 64 per line.
    Ascii01,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "hex" => Ok(Self::Hex),
            "base64" => Ok(Self::Base64),
            "ascii01" => Ok(Self::Ascii01),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (raw|hex|base64|ascii01)"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Raw => "raw",
            Self::Hex => "hex",
            Self::Base64 => "base64",
            Self::Ascii01 => "ascii01",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: SourceConfig,
    pub detector: DetectorConfig,
    pub n_gates: u64,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub substream_bits: u64,
    pub pairing: PairingMode,
}

impl Default for RunConfig {
    /// 1 MHz pulses at λ = 6.93 into a 10% efficient detector, so ηλ ≈ ln 2.
    fn default() -> Self {
        Self {
            source: SourceConfig::default(),
            detector: DetectorConfig::default(),
            n_gates: 4_000_000,
            seed: 1,
            output_format: OutputFormat::Raw,
            substream_bits: 1_000_000,
            pairing: PairingMode::Straddle,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

/// A non-negative integer count, also accepting integral scientific
/// notation such as `4e6`.
pub fn parse_count(value: &str) -> Result<u64> {
    if let Ok(n) = value.parse::<u64>() {
        return Ok(n);
    }
    match value.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 => Ok(x as u64),
        _ => Err(Error::Config(format!("invalid count `{value}`"))),
    }
}

fn count(key: &str, value: &str) -> Result<u64> {
    parse_count(value).map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.source
            .validate()
            .and_then(|_| self.detector.validate())
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.n_gates < 2 {
            return Err(Error::Config(format!(
                "gates must be at least 2, got {}",
                self.n_gates
            )));
        }
        if self.substream_bits < 100 {
            return Err(Error::Config(format!(
                "substream-bits must be at least 100, got {}",
                self.substream_bits
            )));
        }
        Ok(())
    }

    /// Set one field by its flag name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "lambda" => self.source.lambda = parse(key, value)?,
            "rep-rate" => self.source.rep_rate_hz = parse(key, value)?,
            "eta" => self.detector.eta = parse(key, value)?,
            "dark" => self.detector.dark_prob = parse(key, value)?,
            "dead-time-gates" => self.detector.dead_time_gates = count(key, value)?,
            "afterpulse-prob" => self.detector.afterpulse_prob = parse(key, value)?,
            "afterpulse-tau" => self.detector.afterpulse_tau_gates = parse(key, value)?,
            "gate-width" => self.detector.gate_width_ns = parse(key, value)?,
            "gates" => self.n_gates = count(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "format" => self.output_format = value.parse()?,
            "substream-bits" => self.substream_bits = count(key, value)?,
            "pairing" => self.pairing = value.parse().map_err(Error::Config)?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn effective_mu(&self) -> f64 {
        self.detector.eta * self.source.lambda
    }
}

/// Parse `key=value` lines in file order.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected key=value, got `{line}`",
                lineno + 1
            ))
        })?;
        let k = k.trim().trim_start_matches("--");
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}
