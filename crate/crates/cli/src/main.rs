//! `photon-trng`: generate, test and sweep the simulated generator.
//!
//! Exit codes: 0 success or pass, 1 usage or I/O error, 2 statistical
//! failure.

mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use photon_trng::config::parse_key_values;
use photon_trng::detector::{run_gates, write_csv};
use photon_trng::pipeline::{self, StatsDocument};
use photon_trng::randtest::{
    evaluate, run_battery_with, BatteryOptions, ChiSquareMode, Thresholds,
};
use photon_trng::{formats, parse_count, OutputFormat, PairingMode, RandomStream, RunConfig};

const EXIT_FAIL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "photon-trng",
    version,
    about = "Photon-number-detection TRNG simulator and randomness battery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the source and detector and write extracted bits.
    Generate(GenerateArgs),
    /// Run the statistical battery on a bit file.
    Test(TestArgs),
    /// Tabulate analytic and simulated extraction efficiency over ηλ.
    Sweep(SweepArgs),
}

fn count_arg(s: &str) -> Result<u64, String> {
    parse_count(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct GenerateArgs {
    /// Flat key=value file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mean photon number per pulse.
    #[arg(long)]
    lambda: Option<f64>,
    /// Pulse repetition rate in Hz.
    #[arg(long)]
    rep_rate: Option<f64>,
    /// Detection efficiency.
    #[arg(long)]
    eta: Option<f64>,
    /// Dark-count probability per gate.
    #[arg(long)]
    dark: Option<f64>,
    #[arg(long, value_parser = count_arg)]
    dead_time_gates: Option<u64>,
    #[arg(long)]
    afterpulse_prob: Option<f64>,
    /// Trap lifetime in gates.
    #[arg(long)]
    afterpulse_tau: Option<f64>,
    #[arg(long)]
    gate_width: Option<f64>,
    #[arg(long, value_parser = count_arg)]
    gates: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// raw | hex | base64 | ascii01
    #[arg(long)]
    format: Option<String>,
    /// straddle | restart
    #[arg(long)]
    pairing: Option<String>,
    #[arg(long, value_parser = count_arg)]
    substream_bits: Option<u64>,
    /// Bit file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the stats JSON here instead of stdout.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Also dump every gate as `index,applied,click` CSV.
    #[arg(long)]
    dump_gates: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    /// Bit file to score.
    path: PathBuf,
    /// Flat key=value file (reads `format` and `substream-bits`).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = count_arg)]
    substream_bits: Option<u64>,
    /// raw | hex | base64 | ascii01
    #[arg(long)]
    format: Option<String>,
    /// Per-substream significance level.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Smallest acceptable KS-final p-value.
    #[arg(long, default_value_t = 1e-4)]
    min_ks_p: f64,
    /// STS block-frequency block length.
    #[arg(long, default_value_t = 128)]
    block_len: u64,
    /// Score chi-square over byte values instead of bits.
    #[arg(long)]
    byte_chi_square: bool,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    mu_min: f64,
    #[arg(long, default_value_t = 2.0)]
    mu_max: f64,
    #[arg(long, default_value_t = 21)]
    steps: usize,
    #[arg(long, default_value = "1000000", value_parser = count_arg)]
    gates_per_point: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Test(args) => cmd_test(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_key_values(&text)?)
}

fn resolve_run_config(args: &GenerateArgs) -> Result<(RunConfig, Option<PathBuf>)> {
    let mut config = RunConfig::default();
    let mut out = None;
    if let Some(path) = &args.config {
        for (k, v) in read_config_file(path)? {
            if k == "out" {
                out = Some(PathBuf::from(v));
            } else {
                config.set(&k, &v)?;
            }
        }
    }
    macro_rules! apply {
        ($field:expr, $target:expr) => {
            if let Some(v) = $field {
                $target = v;
            }
        };
    }
    apply!(args.lambda, config.source.lambda);
    apply!(args.rep_rate, config.source.rep_rate_hz);
    apply!(args.eta, config.detector.eta);
    apply!(args.dark, config.detector.dark_prob);
    apply!(args.dead_time_gates, config.detector.dead_time_gates);
    apply!(args.afterpulse_prob, config.detector.afterpulse_prob);
    apply!(args.afterpulse_tau, config.detector.afterpulse_tau_gates);
    apply!(args.gate_width, config.detector.gate_width_ns);
    apply!(args.gates, config.n_gates);
    apply!(args.seed, config.seed);
    apply!(args.substream_bits, config.substream_bits);
    if let Some(f) = &args.format {
        config.output_format = f.parse()?;
    }
    if let Some(p) = &args.pairing {
        config.pairing = p.parse::<PairingMode>().map_err(anyhow::Error::msg)?;
    }
    if args.out.is_some() {
        out = args.out.clone();
    }
    config.validate()?;
    Ok((config, out))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<ExitCode> {
    let (config, out) = resolve_run_config(&args)?;
    let Some(out) = out else {
        bail!("no output path: pass --out or set `out` in the config file");
    };
    let generated = pipeline::generate(&config)?;
    fs::write(&out, formats::encode(&generated.bits, config.output_format))
        .with_context(|| format!("writing {}", out.display()))?;

    if let Some(path) = &args.dump_gates {
        let records = run_gates(
            &config.source,
            &config.detector,
            config.n_gates,
            RandomStream::new(config.seed, 0),
        )?;
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&records, io::BufWriter::new(file))?;
    }

    let doc = StatsDocument::new(&config, generated.stats)?;
    let mut json = serde_json::to_string_pretty(&doc)?;
    json.push('\n');
    write_output(args.stats.as_deref(), json.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_test(args: TestArgs) -> Result<ExitCode> {
    let mut format = OutputFormat::Raw;
    let mut substream_bits = RunConfig::default().substream_bits;
    if let Some(path) = &args.config {
        let mut scratch = RunConfig::default();
        for (k, v) in read_config_file(path)? {
            match k.as_str() {
                "format" => format = v.parse()?,
                "substream-bits" => substream_bits = parse_count(&v)?,
                // simulation keys are irrelevant here but must still be valid
                "out" => {}
                _ => scratch.set(&k, &v)?,
            }
        }
    }
    if let Some(f) = &args.format {
        format = f.parse()?;
    }
    if let Some(n) = args.substream_bits {
        substream_bits = n;
    }
    if substream_bits < 100 {
        bail!("--substream-bits must be at least 100");
    }

    let data = fs::read(&args.path).with_context(|| format!("reading {}", args.path.display()))?;
    let bits = formats::decode(&data, format)?;
    if bits.len() < substream_bits {
        bail!(
            "{} holds {} bits, fewer than one substream of {substream_bits}",
            args.path.display(),
            bits.len()
        );
    }
    let options = BatteryOptions {
        alpha: args.alpha,
        block_len: args.block_len,
        chi_square: if args.byte_chi_square {
            ChiSquareMode::Bytes
        } else {
            ChiSquareMode::Bits
        },
    };
    let battery = run_battery_with(&bits, substream_bits, &options)?;
    let verdict = evaluate(
        &battery,
        &Thresholds {
            min_ks_p: args.min_ks_p,
        },
    );
    let doc = report::TestDocument {
        report: battery,
        verdict,
    };

    let json = serde_json::to_string_pretty(&doc)? + "\n";
    if let Some(path) = &args.report {
        fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    if args.json {
        write_output(None, json.as_bytes())?;
    } else {
        write_output(None, report::render_table(&doc).as_bytes())?;
    }
    Ok(if doc.verdict.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let rows = pipeline::sweep(
        args.mu_min,
        args.mu_max,
        args.steps,
        args.gates_per_point,
        args.seed,
    )?;
    let mut buf = Vec::new();
    pipeline::write_sweep_csv(&rows, &mut buf)?;
    write_output(args.out.as_deref(), &buf)?;
    Ok(ExitCode::SUCCESS)
}
