//! Closed-form probability model of the generator.
//!
//! Photon numbers detected from a Poissonian pulse of mean `λ` through a
//! detector of efficiency `η` are again Poissonian with mean `μ = ηλ`. A
//! pair of gates yields bit 1 for (click, no click) and bit 0 for
//! (no click, click), each with probability `e^(−μ)(1 − e^(−μ))`.

use serde::{Deserialize, Serialize};

use crate::special::ln_gamma;
use crate::{Error, Result};

/// Detected mean photon number per gate, `ηλ`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EffectiveMean(f64);

impl EffectiveMean {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::domain(format!(
                "effective mean must be finite and non-negative, got {mu}"
            )));
        }
        Ok(Self(mu))
    }

    pub fn from_source(eta: f64, lambda: f64) -> Result<Self> {
        Self::new(eta * lambda)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyPoint {
    pub mu: EffectiveMean,
    /// Random bits per detection event.
    pub efficiency: f64,
}

/// Poisson probability of `n` detected photons at mean `mu`, evaluated in
/// log space so large `n` and `mu` stay finite.
pub fn poisson_pmf(mu: f64, n: u64) -> Result<f64> {
    let mu = EffectiveMean::new(mu)?.get();
    Ok(pmf_unchecked(mu, n))
}

fn pmf_unchecked(mu: f64, n: u64) -> f64 {
    if mu == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let n_f = n as f64;
    (n_f * mu.ln() - mu - ln_gamma(n_f + 1.0)).exp()
}

/// Probability that an ordered pair of independent gates yields a 1
/// (equivalently, a 0).
pub fn bit_probability(mu: f64) -> Result<f64> {
    let mu = EffectiveMean::new(mu)?.get();
    let no_click = (-mu).exp();
    let click = 1.0 - no_click;
    Ok(click * no_click)
}

/// Random bits per detection event (per gate, not per pair).
///
/// `(P(1) + P(0)) / 2` reduces to the single-bit probability.
pub fn extraction_efficiency(mu: f64) -> Result<f64> {
    let p = bit_probability(mu)?;
    Ok((p + p) / 2.0)
}

/// The effective mean maximizing extraction efficiency: `ln 2`, where a
/// click and a no-click are equally likely.
pub fn optimal_mu() -> EffectiveMean {
    EffectiveMean(std::f64::consts::LN_2)
}

/// Efficiency on a closed, uniformly spaced grid over `[mu_min, mu_max]`.
pub fn efficiency_curve(mu_min: f64, mu_max: f64, steps: usize) -> Result<Vec<EfficiencyPoint>> {
    let grid = closed_grid(mu_min, mu_max, steps)?;
    grid.into_iter()
        .map(|mu| {
            Ok(EfficiencyPoint {
                mu: EffectiveMean::new(mu)?,
                efficiency: extraction_efficiency(mu)?,
            })
        })
        .collect()
}

/// `steps` points from `lo` to `hi`, both endpoints included exactly.
pub fn closed_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo >= hi {
        return Err(Error::domain(format!(
            "grid range must satisfy 0 <= min < max, got [{lo}, {hi}]"
        )));
    }
    if steps < 2 {
        return Err(Error::domain("grid needs at least 2 steps"));
    }
    let h = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + i as f64 * h
            }
        })
        .collect())
}

/// Index of the largest efficiency in a curve; first one wins on ties.
pub fn argmax(curve: &[EfficiencyPoint]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in curve.iter().enumerate() {
        if best.is_none_or(|(_, e)| p.efficiency > e) {
            best = Some((i, p.efficiency));
        }
    }
    best.map(|(i, _)| i)
}
