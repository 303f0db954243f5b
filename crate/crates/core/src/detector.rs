//! Gated Geiger-mode avalanche photodiode.
//!
//! Each applied gate clicks when at least one of three independent events
//! occurs: a photon is detected (each photon with probability `eta`), a dark
//! count fires, or a carrier trapped by the most recent avalanche is
//! released. Any click, whatever its cause, starts a dead time of
//! `dead_time_gates` suppressed gates and refills the trap.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::rng::RandomStream;
use crate::source::{PoissonSampler, SourceConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Probability that an incident photon triggers an avalanche.
    pub eta: f64,
    /// Dark-count probability per applied gate.
    pub dark_prob: f64,
    /// Gates suppressed after every click.
    pub dead_time_gates: u64,
    /// Afterpulse amplitude right after an avalanche.
    pub afterpulse_prob: f64,
    /// Trap emission lifetime, in gates.
    pub afterpulse_tau_gates: f64,
    /// Gate width. Metadata; its effect is already in `dark_prob`.
    pub gate_width_ns: f64,
}

impl Default for DetectorConfig {
    /// InGaAs SPD at 1 MHz: 10% efficiency, 3e-5 dark counts per 2.5 ns
    /// gate and 8 µs (8 gate) dead time. The afterpulse trap parameters are
    /// simulation defaults, not measured values.
    fn default() -> Self {
        Self {
            eta: 0.10,
            dark_prob: 3.0e-5,
            dead_time_gates: 8,
            afterpulse_prob: 0.05,
            afterpulse_tau_gates: 3.0,
            gate_width_ns: 2.5,
        }
    }
}

impl DetectorConfig {
    /// No dark counts, no afterpulsing, no dead time.
    pub fn ideal(eta: f64) -> Self {
        Self {
            eta,
            dark_prob: 0.0,
            dead_time_gates: 0,
            afterpulse_prob: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("eta", self.eta),
            ("dark_prob", self.dark_prob),
            ("afterpulse_prob", self.afterpulse_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!(
                    "{name} must be a probability, got {p}"
                )));
            }
        }
        if !(self.afterpulse_tau_gates.is_finite() && self.afterpulse_tau_gates > 0.0) {
            return Err(Error::domain(format!(
                "afterpulse_tau_gates must be positive, got {}",
                self.afterpulse_tau_gates
            )));
        }
        if !(self.gate_width_ns.is_finite() && self.gate_width_ns > 0.0) {
            return Err(Error::domain(format!(
                "gate_width_ns must be positive, got {}",
                self.gate_width_ns
            )));
        }
        Ok(())
    }

    fn afterpulse_at(&self, gates_since: u64) -> f64 {
        if self.afterpulse_prob == 0.0 {
            return 0.0;
        }
        self.afterpulse_prob * (-(gates_since as f64) / self.afterpulse_tau_gates).exp()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DetectorState {
    pub gates_remaining_dead: u64,
    pub last_avalanche_gate: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateRecord {
    pub index: u64,
    /// False when the gate fell inside a dead time.
    pub applied: bool,
    pub click: bool,
}

/// Advance the detector by one gate.
///
/// During dead time the gate is not applied and no randomness is consumed.
/// Otherwise the three click causes are combined into one Bernoulli draw
/// with `1 − (1−p_signal)(1−p_dark)(1−p_afterpulse)`, which has the same law
/// as OR-ing three independent trials.
pub fn detect_gate(
    state: &mut DetectorState,
    config: &DetectorConfig,
    photon_count: u64,
    gate_index: u64,
    stream: &mut RandomStream,
) -> GateRecord {
    if state.gates_remaining_dead > 0 {
        state.gates_remaining_dead -= 1;
        return GateRecord {
            index: gate_index,
            applied: false,
            click: false,
        };
    }
    let click = stream.bernoulli(click_probability(state, config, photon_count, gate_index));
    if click {
        state.gates_remaining_dead = config.dead_time_gates;
        state.last_avalanche_gate = Some(gate_index);
    }
    GateRecord {
        index: gate_index,
        applied: true,
        click,
    }
}

fn click_probability(
    state: &DetectorState,
    config: &DetectorConfig,
    photon_count: u64,
    gate_index: u64,
) -> f64 {
    let miss_signal = if photon_count == 0 {
        1.0
    } else {
        (1.0 - config.eta).powf(photon_count as f64)
    };
    let miss_afterpulse = match state.last_avalanche_gate {
        Some(g) => 1.0 - config.afterpulse_at(gate_index - g),
        None => 1.0,
    };
    1.0 - miss_signal * (1.0 - config.dark_prob) * miss_afterpulse
}

/// Outcome of the next applied gate, with the suppressed gates before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateEvent {
    pub suppressed_before: u64,
    pub click: bool,
}

/// A source driving a detector for a fixed number of gates.
///
/// Iterating yields every gate. [`GateRun::next_event`] skips suppressed
/// gates in bulk and yields the same underlying sequence.
#[derive(Clone, Debug)]
pub struct GateRun {
    sampler: PoissonSampler,
    detector: DetectorConfig,
    state: DetectorState,
    stream: RandomStream,
    next_index: u64,
    end: u64,
}

impl GateRun {
    pub fn new(
        source: &SourceConfig,
        detector: &DetectorConfig,
        n_gates: u64,
        stream: RandomStream,
    ) -> Result<Self> {
        source.validate()?;
        detector.validate()?;
        if n_gates == 0 {
            return Err(Error::domain("gate count must be at least 1"));
        }
        Ok(Self {
            sampler: PoissonSampler::new(source.lambda)?,
            detector: *detector,
            state: DetectorState::default(),
            stream,
            next_index: 0,
            end: n_gates,
        })
    }

    pub fn state(&self) -> &DetectorState {
        &self.state
    }

    pub fn gates_done(&self) -> u64 {
        self.next_index
    }

    fn step(&mut self) -> GateRecord {
        let index = self.next_index;
        self.next_index += 1;
        let photons = if self.state.gates_remaining_dead > 0 {
            0
        } else {
            self.sampler.sample(&mut self.stream)
        };
        detect_gate(
            &mut self.state,
            &self.detector,
            photons,
            index,
            &mut self.stream,
        )
    }

    /// Skip to the next applied gate and fire it. Returns `None` once the
    /// run is exhausted; trailing suppressed gates are still consumed.
    pub fn next_event(&mut self) -> Option<GateEvent> {
        let remaining = self.end - self.next_index;
        let skip = self.state.gates_remaining_dead.min(remaining);
        self.state.gates_remaining_dead -= skip;
        self.next_index += skip;
        if self.next_index == self.end {
            return None;
        }
        let rec = self.step();
        debug_assert!(rec.applied);
        Some(GateEvent {
            suppressed_before: skip,
            click: rec.click,
        })
    }
}

impl Iterator for GateRun {
    type Item = GateRecord;

    fn next(&mut self) -> Option<GateRecord> {
        if self.next_index == self.end {
            None
        } else {
            Some(self.step())
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next_index) as usize;
        (n, Some(n))
    }
}

/// Simulate `n_gates` gates and collect every record.
pub fn run_gates(
    source: &SourceConfig,
    detector: &DetectorConfig,
    n_gates: u64,
    stream: RandomStream,
) -> Result<Vec<GateRecord>> {
    Ok(GateRun::new(source, detector, n_gates, stream)?.collect())
}

/// Clicks per applied gate.
pub fn click_rate(records: &[GateRecord]) -> Result<f64> {
    let (applied, clicks) = records.iter().fold((0u64, 0u64), |(a, c), r| {
        (a + r.applied as u64, c + r.click as u64)
    });
    if applied == 0 {
        return Err(Error::Computation("no applied gates".into()));
    }
    Ok(clicks as f64 / applied as f64)
}

/// Debug dump as `index,applied,click` with 0/1 booleans.
pub fn write_csv<W: Write>(records: &[GateRecord], mut out: W) -> Result<()> {
    writeln!(out, "index,applied,click")?;
    for r in records {
        writeln!(out, "{},{},{}", r.index, r.applied as u8, r.click as u8)?;
    }
    Ok(())
}
