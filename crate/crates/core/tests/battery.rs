//! Battery behaviour on reference, simulated and pathological inputs.

use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};

use photon_trng::pipeline::generate_bits;
use photon_trng::randtest::{
    arithmetic_mean, block_frequency, evaluate, frequency_monobit, ks_uniform, monte_carlo_pi,
    run_battery, runs_test, serial_correlation, PValue, Thresholds, STS_TESTS,
};
use photon_trng::{BitStream, RandomStream, RunConfig};

const SUB: u64 = 1_000_000;

fn reference_bits(bytes: usize, seed: u64) -> BitStream {
    let mut buf = vec![0u8; bytes];
    StdRng::seed_from_u64(seed).fill_bytes(&mut buf);
    BitStream::from_bytes(buf)
}

fn biased_bits(bits: u64, p: f64, seed: u64) -> BitStream {
    let mut s = RandomStream::new(seed, 0);
    (0..bits).map(|_| s.bernoulli(p)).collect()
}

fn simulated(bits: u64) -> BitStream {
    generate_bits(&RunConfig::default(), bits, 20_000_000)
        .unwrap()
        .bits
}

#[test]
fn pvalues_calibrated_on_reference_generator() {
    // 200 substreams of 10⁵ bits
    let bits = reference_bits(2_500_000, 301);
    let report = run_battery(&bits, 100_000).unwrap();
    assert_eq!(report.substreams, 200);
    for test in STS_TESTS {
        let p = report.ks_final[test].value;
        assert!(p >= 1e-4, "{test}: KS-final {p}");
    }
}

#[test]
fn stream_generator_passes_battery() {
    let mut buf = vec![0u8; 2_500_000];
    RandomStream::new(302, 0).fill_bytes(&mut buf);
    let report = run_battery(&BitStream::from_bytes(buf), 100_000).unwrap();
    let verdict = evaluate(&report, &Thresholds::default());
    assert!(verdict.passed, "{:?}", verdict.failures);
}

#[test]
fn ks_calibration() {
    let mut rng = StdRng::seed_from_u64(303);
    let passes = (0..1000)
        .filter(|_| {
            let ps: Vec<PValue> = (0..100)
                .map(|_| PValue::new("u", rng.gen::<f64>()))
                .collect();
            ks_uniform(&ps).unwrap().value >= 0.01
        })
        .count();
    assert!(passes >= 950, "{passes} of 1000");
}

#[test]
fn simulated_output_ent_metrics() {
    let bits = simulated(10_000_000);
    let mean = arithmetic_mean(&bits.slice(0, SUB)).unwrap();
    assert!((mean - 0.5).abs() <= 0.002, "mean {mean}");
    let c = serial_correlation(&bits.slice(0, SUB)).unwrap();
    assert!(c.abs() <= 0.004, "serial {c}");
    let (pi, points) = monte_carlo_pi(&bits).unwrap();
    assert_eq!(points, 10_000_000 / 48);
    assert!((pi - std::f64::consts::PI).abs() <= 0.02, "pi {pi}");
}

#[test]
fn runs_pass_on_simulated_substreams() {
    let bits = simulated(100 * SUB);
    let passed = (0..100)
        .filter(|&k| runs_test(&bits.slice(k * SUB, SUB)).unwrap().value >= 0.01)
        .count();
    assert!(passed >= 96, "{passed} of 100");
}

#[test]
fn battery_partitions_ten_substreams() {
    let bits = simulated(10 * SUB);
    let report = run_battery(&bits, SUB).unwrap();
    assert_eq!(report.substreams, 10);
    assert!(report.sts_pvalues.iter().all(|row| row.len() == 3));
    assert_eq!(report, run_battery(&bits, SUB).unwrap());
}

#[test]
fn pathological_streams_rejected() {
    let constant = BitStream::from_bytes(vec![0xFF; 3 * SUB as usize / 8]);
    let alternating = BitStream::from_bytes(vec![0x55; 3 * SUB as usize / 8]);
    let biased = biased_bits(3 * SUB, 0.6, 304);
    for k in 0..3 {
        let c = constant.slice(k * SUB, SUB);
        let a = alternating.slice(k * SUB, SUB);
        let b = biased.slice(k * SUB, SUB);
        for s in [&c, &b] {
            assert!(frequency_monobit(s).unwrap().value < 0.01);
            assert!(block_frequency(s, 128).unwrap().value < 0.01);
            assert!(runs_test(s).unwrap().value < 0.01);
        }
        // monobit and even-length block frequency cannot see alternation
        assert_eq!(frequency_monobit(&a).unwrap().value, 1.0);
        assert_eq!(block_frequency(&a, 128).unwrap().value, 1.0);
        assert!(runs_test(&a).unwrap().value < 0.01);
    }
}

#[test]
fn biased_input_never_passes_monobit() {
    let bits = biased_bits(10 * SUB, 0.6, 305);
    let report = run_battery(&bits, SUB).unwrap();
    assert_eq!(report.pass_proportion["frequency_monobit"].proportion, 0.0);
    assert!(!evaluate(&report, &Thresholds::default()).passed);
}
