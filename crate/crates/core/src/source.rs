//! Pulsed attenuated laser: Poissonian photon numbers per pulse.

use serde::{Deserialize, Serialize};

use crate::rng::RandomStream;
use crate::{Error, Result};

/// Largest mean photon number accepted, keeping sequential search short.
pub const MAX_LAMBDA: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    /// Mean photon number per pulse.
    pub lambda: f64,
    /// Pulse repetition rate in Hz. Used only for throughput reporting.
    pub rep_rate_hz: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            lambda: 6.93,
            rep_rate_hz: 1.0e6,
        }
    }
}

impl SourceConfig {
    pub fn new(lambda: f64, rep_rate_hz: f64) -> Result<Self> {
        let config = Self {
            lambda,
            rep_rate_hz,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        if !(self.rep_rate_hz.is_finite() && self.rep_rate_hz > 0.0) {
            return Err(Error::domain(format!(
                "repetition rate must be positive, got {}",
                self.rep_rate_hz
            )));
        }
        Ok(())
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=MAX_LAMBDA).contains(&lambda) {
        return Err(Error::domain(format!(
            "mean photon number must lie in [0, {MAX_LAMBDA}], got {lambda}"
        )));
    }
    Ok(())
}

/// Precomputed sequential-search Poisson sampler for a fixed mean.
#[derive(Clone, Copy, Debug)]
pub struct PoissonSampler {
    lambda: f64,
    p0: f64,
}

impl PoissonSampler {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            p0: (-lambda).exp(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Inversion by walking the cumulative pmf. Uses exactly one uniform
    /// draw, or none when `lambda == 0`.
    #[inline]
    pub fn sample(&self, stream: &mut RandomStream) -> u64 {
        if self.lambda == 0.0 {
            return 0;
        }
        let u = stream.next_f64();
        let mut k = 0u64;
        let mut p = self.p0;
        let mut cdf = p;
        while u >= cdf {
            k += 1;
            p *= self.lambda / k as f64;
            let next = cdf + p;
            // cdf has saturated below u through rounding
            if next == cdf {
                break;
            }
            cdf = next;
        }
        k
    }
}

/// One Poisson(`lambda`) photon number.
pub fn sample_photon_number(stream: &mut RandomStream, lambda: f64) -> Result<u64> {
    Ok(PoissonSampler::new(lambda)?.sample(stream))
}

/// `count` independent photon numbers for consecutive pulses.
pub fn generate_pulses(
    config: &SourceConfig,
    count: usize,
    stream: &mut RandomStream,
) -> Result<Vec<u64>> {
    config.validate()?;
    if count == 0 {
        return Err(Error::domain("pulse count must be at least 1"));
    }
    let sampler = PoissonSampler::new(config.lambda)?;
    Ok((0..count).map(|_| sampler.sample(stream)).collect())
}
