//! Pair coding with von Neumann scan-and-discard.
//!
//! Successive non-overlapping pairs of detection events are read left to
//! right: (click, no click) emits 1, (no click, click) emits 0, equal pairs
//! are dropped. For i.i.d. clicks both outcomes have probability `p(1−p)`,
//! so the output is unbiased whatever the click probability.

use serde::{Deserialize, Serialize};

use crate::bits::BitStream;
use crate::detector::GateRecord;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionStats {
    pub gates_applied: u64,
    pub pairs_scanned: u64,
    pub bits_emitted: u64,
    pub ones_emitted: u64,
    pub discarded_pairs: u64,
}

impl ExtractionStats {
    /// Bits per detection event. Zero when nothing was detected.
    pub fn efficiency(&self) -> f64 {
        if self.gates_applied == 0 {
            0.0
        } else {
            self.bits_emitted as f64 / self.gates_applied as f64
        }
    }

    pub fn merge(&mut self, other: &ExtractionStats) {
        self.gates_applied += other.gates_applied;
        self.pairs_scanned += other.pairs_scanned;
        self.bits_emitted += other.bits_emitted;
        self.ones_emitted += other.ones_emitted;
        self.discarded_pairs += other.discarded_pairs;
    }
}

/// How pairs relate to dead-time gaps between applied gates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingMode {
    /// Pair successive applied gates even across suppressed gates.
    #[default]
    Straddle,
    /// Drop a half-formed pair whenever a suppressed gate intervenes.
    Restart,
}

impl std::str::FromStr for PairingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "straddle" => Ok(Self::Straddle),
            "restart" => Ok(Self::Restart),
            other => Err(format!("unknown pairing mode `{other}` (straddle|restart)")),
        }
    }
}

/// Streaming von Neumann extractor.
#[derive(Clone, Debug, Default)]
pub struct VonNeumann {
    pending: Option<bool>,
    stats: ExtractionStats,
    bits: BitStream,
}

impl VonNeumann {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feed one detection event.
    #[inline]
    pub fn push(&mut self, click: bool) {
        self.stats.gates_applied += 1;
        match self.pending.take() {
            None => self.pending = Some(click),
            Some(first) => {
                self.stats.pairs_scanned += 1;
                if first != click {
                    self.bits.push(first);
                    self.stats.bits_emitted += 1;
                    self.stats.ones_emitted += first as u64;
                } else {
                    self.stats.discarded_pairs += 1;
                }
            }
        }
    }

    /// Forget a half-formed pair.
    pub fn break_pair(&mut self) {
        self.pending = None;
    }

    pub fn bits(&self) -> &BitStream {
        &self.bits
    }

    pub fn stats(&self) -> &ExtractionStats {
        &self.stats
    }

    /// A trailing unpaired event is ignored.
    pub fn finish(self) -> (BitStream, ExtractionStats) {
        (self.bits, self.stats)
    }
}

pub fn von_neumann_extract(clicks: &[bool]) -> (BitStream, ExtractionStats) {
    let mut vn = VonNeumann::new();
    for &c in clicks {
        vn.push(c);
    }
    vn.finish()
}

/// Extract from a gate record stream, straddling dead-time gaps.
pub fn extract_from_gates(records: &[GateRecord]) -> (BitStream, ExtractionStats) {
    extract_from_gates_with(records, PairingMode::Straddle)
}

pub fn extract_from_gates_with(
    records: &[GateRecord],
    mode: PairingMode,
) -> (BitStream, ExtractionStats) {
    let mut vn = VonNeumann::new();
    for r in records {
        if r.applied {
            vn.push(r.click);
        } else if mode == PairingMode::Restart {
            vn.break_pair();
        }
    }
    vn.finish()
}
