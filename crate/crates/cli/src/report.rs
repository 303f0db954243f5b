use std::fmt::Write;

use serde::Serialize;

use photon_trng::randtest::{BatteryReport, Verdict, STS_TESTS};

#[derive(Serialize)]
pub struct TestDocument {
    #[serde(flatten)]
    pub report: BatteryReport,
    pub verdict: Verdict,
}

/// Human-readable summary: whole-stream metrics first, then the
/// per-substream tests.
pub fn render_table(doc: &TestDocument) -> String {
    let r = &doc.report;
    let e = &r.ent;
    let mut s = String::new();
    let _ = writeln!(s, "Whole stream: {} bits", e.bit_length);
    let _ = writeln!(
        s,
        "  entropy                {:.6} bits per bit",
        e.entropy_bits_per_bit
    );
    let _ = writeln!(
        s,
        "  optimum compression    {:.0} percent",
        e.optimum_compression_percent
    );
    let _ = writeln!(
        s,
        "  chi-square             {:.2}, exceeded {:.2}% of the time",
        e.chi_square_stat,
        100.0 * e.chi_square_exceed_prob
    );
    let _ = writeln!(
        s,
        "  arithmetic mean        {:.4} (0.5 = random)",
        e.arithmetic_mean
    );
    let _ = writeln!(
        s,
        "  Monte Carlo pi         {:.9} (error {:.2} percent)",
        e.monte_carlo_pi, e.monte_carlo_pi_error_percent
    );
    match e.serial_correlation {
        Some(c) => {
            let _ = writeln!(s, "  serial correlation     {c:.6} (uncorrelated = 0.0)");
        }
        None => {
            let _ = writeln!(s, "  serial correlation     undefined (constant stream)");
        }
    }
    let _ = writeln!(
        s,
        "\nSubstreams: {} x {} bits, alpha = {}",
        r.substreams, r.substream_bits, r.options.alpha
    );
    let _ = writeln!(
        s,
        "  {:<20} {:>12} {:>10} {:>19}",
        "test", "KS-final p", "pass", "band"
    );
    for test in STS_TESTS {
        let ks = r
            .ks_final
            .get(test)
            .map_or("-".to_string(), |p| format!("{:.6}", p.value));
        let (pass, band) = match r.pass_proportion.get(test) {
            Some(pp) => (
                format!("{:.4}", pp.proportion),
                format!("[{:.4}, {:.4}]", pp.low, pp.high),
            ),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(s, "  {test:<20} {ks:>12} {pass:>10} {band:>19}");
    }
    let _ = writeln!(
        s,
        "\nResult: {}",
        if doc.verdict.passed { "PASS" } else { "FAIL" }
    );
    for f in &doc.verdict.failures {
        let _ = writeln!(s, "  {f}");
    }
    s
}
