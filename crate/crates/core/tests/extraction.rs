use photon_trng::detector::{run_gates, DetectorConfig};
use photon_trng::extractor::{extract_from_gates, von_neumann_extract};
use photon_trng::pipeline::generate;
use photon_trng::{RandomStream, RunConfig, SourceConfig};

/// Probability-weighted counts of emitted 1s and 0s over every click string
/// of length `len` with i.i.d. click probability `p`.
fn enumerate_masses(len: u32, p: f64) -> (f64, f64) {
    let mut ones = 0.0;
    let mut zeros = 0.0;
    for word in 0u32..1 << len {
        let clicks: Vec<bool> = (0..len).map(|i| word >> i & 1 == 1).collect();
        let k = word.count_ones() as i32;
        let weight = p.powi(k) * (1.0 - p).powi(len as i32 - k);
        let (bits, stats) = von_neumann_extract(&clicks);
        ones += weight * stats.ones_emitted as f64;
        zeros += weight * (bits.len() - stats.ones_emitted) as f64;
    }
    (ones, zeros)
}

#[test]
fn exact_unbiasedness_by_enumeration() {
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let (ones, zeros) = enumerate_masses(10, p);
        assert!((ones - zeros).abs() <= 1e-12, "p = {p}: {ones} vs {zeros}");
        // five pairs, each emitting a given bit with probability p(1 − p)
        assert!((ones - 5.0 * p * (1.0 - p)).abs() <= 1e-12);
    }
}

#[test]
fn efficiency_at_optimum_ideal_detector() {
    let source = SourceConfig::new(6.93, 1e6).unwrap();
    let recs = run_gates(
        &source,
        &DetectorConfig::ideal(0.1),
        4_000_000,
        RandomStream::new(201, 0),
    )
    .unwrap();
    let (_, stats) = extract_from_gates(&recs);
    assert_eq!(stats.gates_applied, 4_000_000);
    assert!(
        (stats.efficiency() - 0.25).abs() <= 0.002,
        "{}",
        stats.efficiency()
    );
    assert!(stats.bits_emitted <= stats.gates_applied / 2);
}

#[test]
fn efficiency_for_iid_clicks() {
    let n = 1_000_000;
    let mut s = RandomStream::new(202, 0);
    let clicks: Vec<bool> = (0..n).map(|_| s.bernoulli(0.1)).collect();
    let (_, stats) = von_neumann_extract(&clicks);
    // per-pair bit probability 2p(1 − p) = 0.18, halved per gate
    let tol = 4.0 * (0.18f64 * 0.82 / (n as f64 / 2.0)).sqrt() / 2.0;
    assert!(
        (stats.efficiency() - 0.09).abs() <= tol,
        "{}",
        stats.efficiency()
    );
}

#[test]
fn default_pipeline_consumption_bound() {
    let g = generate(&RunConfig {
        n_gates: 500_000,
        ..RunConfig::default()
    })
    .unwrap();
    let s = g.stats;
    assert!(s.bits_emitted <= s.gates_applied / 2);
    assert_eq!(s.bits_emitted + s.discarded_pairs, s.pairs_scanned);
    assert!(s.gates_applied < 500_000);
}
