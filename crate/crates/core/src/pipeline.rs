//! Source → detector → extractor runs, and the efficiency sweep.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitStream;
use crate::config::RunConfig;
use crate::detector::{DetectorConfig, GateRun};
use crate::extractor::{ExtractionStats, PairingMode, VonNeumann};
use crate::rng::RandomStream;
use crate::source::SourceConfig;
use crate::theory::{closed_grid, extraction_efficiency};
use crate::{Error, Result};

/// Smallest gate budget per sweep point.
pub const MIN_SWEEP_GATES: u64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub bits: BitStream,
    pub stats: ExtractionStats,
}

/// The stats document written next to a bit file. The extraction counters
/// appear at top level under their own names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    #[serde(flatten)]
    pub stats: ExtractionStats,
    pub gates_total: u64,
    /// Bits per applied gate.
    pub efficiency: f64,
    pub effective_mu: f64,
    pub analytic_efficiency: f64,
    /// Output bits per second at the configured repetition rate.
    pub bit_rate_hz: f64,
    pub config: RunConfig,
}

impl StatsDocument {
    pub fn new(config: &RunConfig, stats: ExtractionStats) -> Result<Self> {
        let mu = config.effective_mu();
        Ok(Self {
            stats,
            gates_total: config.n_gates,
            efficiency: stats.efficiency(),
            effective_mu: mu,
            analytic_efficiency: extraction_efficiency(mu)?,
            bit_rate_hz: stats.bits_emitted as f64 / config.n_gates as f64
                * config.source.rep_rate_hz,
            config: config.clone(),
        })
    }
}

fn extract_run(mut run: GateRun, pairing: PairingMode) -> Generated {
    let mut vn = VonNeumann::new();
    while let Some(ev) = run.next_event() {
        if pairing == PairingMode::Restart && ev.suppressed_before > 0 {
            vn.break_pair();
        }
        vn.push(ev.click);
    }
    let (bits, stats) = vn.finish();
    Generated { bits, stats }
}

/// One full pipeline run on stream `(config.seed, 0)`.
pub fn generate(config: &RunConfig) -> Result<Generated> {
    generate_on_stream(config, 0)
}

pub fn generate_on_stream(config: &RunConfig, stream_id: u64) -> Result<Generated> {
    config.validate()?;
    let run = GateRun::new(
        &config.source,
        &config.detector,
        config.n_gates,
        RandomStream::new(config.seed, stream_id),
    )?;
    Ok(extract_run(run, config.pairing))
}

/// `count` independent runs on stream ids `0..count`, in parallel.
pub fn generate_independent(config: &RunConfig, count: u64) -> Result<Vec<Generated>> {
    config.validate()?;
    (0..count)
        .into_par_iter()
        .map(|id| generate_on_stream(config, id))
        .collect()
}

/// Run until at least `min_bits` bits exist, `gates_per_chunk` gates at a
/// time on successive stream ids, and return exactly `min_bits` bits.
pub fn generate_bits(config: &RunConfig, min_bits: u64, gates_per_chunk: u64) -> Result<Generated> {
    let mut chunk_config = config.clone();
    chunk_config.n_gates = gates_per_chunk;
    chunk_config.validate()?;
    let mut bits = BitStream::with_capacity(min_bits as usize);
    let mut stats = ExtractionStats::default();
    let mut id = 0;
    while bits.len() < min_bits {
        let g = generate_on_stream(&chunk_config, id)?;
        bits.append(&g.bits);
        if bits.is_empty() && id >= 16 {
            return Err(Error::Computation("configuration emits no bits".into()));
        }
        stats.merge(&g.stats);
        id += 1;
    }
    bits.truncate(min_bits);
    Ok(Generated { bits, stats })
}

/// Extraction over disjoint chunks in parallel. Chunk lengths are rounded up
/// to even so no pair straddles a boundary; the result equals the serial
/// scan.
pub fn von_neumann_extract_par(clicks: &[bool], chunk_len: usize) -> (BitStream, ExtractionStats) {
    let chunk_len = (chunk_len.max(2) + 1) & !1;
    let parts: Vec<_> = clicks
        .par_chunks(chunk_len)
        .map(crate::extractor::von_neumann_extract)
        .collect();
    let mut bits = BitStream::new();
    let mut stats = ExtractionStats::default();
    for (b, s) in parts {
        bits.append(&b);
        stats.merge(&s);
    }
    (bits, stats)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mu: f64,
    pub analytic: f64,
    pub simulated: f64,
}

/// Analytic and simulated efficiency over a closed `mu` grid. Each point
/// runs an ideal unit-efficiency detector at `λ = mu` on its own stream id.
pub fn sweep(
    mu_min: f64,
    mu_max: f64,
    steps: usize,
    gates_per_point: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if gates_per_point < MIN_SWEEP_GATES {
        return Err(Error::domain(format!(
            "sweep needs at least {MIN_SWEEP_GATES} gates per point, got {gates_per_point}"
        )));
    }
    let grid = closed_grid(mu_min, mu_max, steps)?;
    grid.par_iter()
        .enumerate()
        .map(|(i, &mu)| {
            let source = SourceConfig::new(mu, 1e6)?;
            let run = GateRun::new(
                &source,
                &DetectorConfig::ideal(1.0),
                gates_per_point,
                RandomStream::new(seed, i as u64),
            )?;
            let g = extract_run(run, PairingMode::Straddle);
            Ok(SweepRow {
                mu,
                analytic: extraction_efficiency(mu)?,
                simulated: g.stats.efficiency(),
            })
        })
        .collect()
}

/// CSV with header `mu,analytic,simulated`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "mu,analytic,simulated")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.mu, r.analytic, r.simulated)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::run_gates;
    use crate::extractor::{extract_from_gates_with, von_neumann_extract};

    fn small() -> RunConfig {
        RunConfig {
            n_gates: 100_000,
            ..RunConfig::default()
        }
    }

    #[test]
    fn streaming_matches_record_path() {
        for pairing in [PairingMode::Straddle, PairingMode::Restart] {
            let cfg = RunConfig { pairing, ..small() };
            let g = generate(&cfg).unwrap();
            let recs = run_gates(
                &cfg.source,
                &cfg.detector,
                cfg.n_gates,
                RandomStream::new(cfg.seed, 0),
            )
            .unwrap();
            let (bits, stats) = extract_from_gates_with(&recs, pairing);
            assert_eq!(g.bits, bits);
            assert_eq!(g.stats, stats);
        }
    }

    #[test]
    fn restart_pairing_with_dead_time_only_emits_zeros() {
        // a click is always followed by a gap, so (1, 0) pairs never form
        let g = generate(&RunConfig {
            pairing: PairingMode::Restart,
            ..small()
        })
        .unwrap();
        assert!(g.stats.bits_emitted > 0);
        assert_eq!(g.stats.ones_emitted, 0);
    }

    #[test]
    fn zero_lambda_emits_nothing_without_dark_counts() {
        let mut cfg = small();
        cfg.source.lambda = 0.0;
        cfg.detector.dark_prob = 0.0;
        let g = generate(&cfg).unwrap();
        assert!(g.bits.is_empty());
        assert_eq!(g.stats.efficiency(), 0.0);
        assert!(generate_bits(&cfg, 10, 1000).is_err());
    }

    #[test]
    fn generate_bits_exact_length() {
        let g = generate_bits(&small(), 12_345, 20_000).unwrap();
        assert_eq!(g.bits.len(), 12_345);
    }

    #[test]
    fn parallel_extraction_equals_serial() {
        let mut s = RandomStream::new(4, 0);
        let clicks: Vec<bool> = (0..10_001).map(|_| s.bernoulli(0.3)).collect();
        let serial = von_neumann_extract(&clicks);
        for chunk in [1, 2, 7, 100, 333, 20_000] {
            assert_eq!(
                von_neumann_extract_par(&clicks, chunk),
                serial,
                "chunk {chunk}"
            );
        }
    }

    #[test]
    fn stats_document_shape() {
        let cfg = small();
        let g = generate(&cfg).unwrap();
        let doc = StatsDocument::new(&cfg, g.stats).unwrap();
        let v = serde_json::to_value(&doc).unwrap();
        for key in [
            "gates_applied",
            "pairs_scanned",
            "bits_emitted",
            "ones_emitted",
            "discarded_pairs",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["config"]["n_gates"], 100_000);
        let back: StatsDocument = serde_json::from_value(v).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn sweep_rejects_bad_input() {
        assert!(sweep(0.0, 2.0, 21, 9_999, 1).is_err());
        assert!(sweep(2.0, 0.0, 21, 10_000, 1).is_err());
        assert!(sweep(0.0, 200.0, 3, 10_000, 1).is_err());
    }

    #[test]
    fn sweep_csv() {
        let rows = sweep(0.0, 1.0, 3, 10_000, 1).unwrap();
        assert_eq!(rows[0].analytic, 0.0);
        assert_eq!(rows[0].simulated, 0.0);
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("mu,analytic,simulated\n0,0,0\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
