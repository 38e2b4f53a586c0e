use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use qss_core::adversary::{evaluate_attack_with, AdversaryConfig, AttackRegistry, BasisStrategy};
use qss_core::analysis::{
    aggregate, detection_scaling, qkd_rounds, qkd_success, write_summary_csv, Scheme, SummaryRow,
    SUMMARY_HEADER,
};
use qss_core::mub::verify_mubs;
use qss_core::transcript::{write_jsonl, TranscriptView};
use qss_core::{run_session, Dimension, ProtocolConfig, TapSet, Verdict};

mod config;

use config::{resolve_seed, FileConfig};

const EXIT_CORRUPT: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Check(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<qss_core::Error> for CliError {
    fn from(e: qss_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Parser)]
#[command(name = "qss", version, about = "Single-qudit secret sharing simulator")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an honest (or noisy) session and write its transcripts.
    Run(RunArgs),
    /// Run a session with an eavesdropper installed and report detection.
    Attack(AttackArgs),
    /// Tabulate the QKD round count, success probability and detector scaling.
    Compare(CompareArgs),
    /// Exhaustively check unbiasedness and the cyclic gate action.
    VerifyMubs(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct SessionArgs {
    /// Flat key-value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Qudit dimension (odd prime).
    #[arg(long)]
    d: Option<u32>,
    /// Number of recipients N.
    #[arg(long)]
    recipients: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Seed; falls back to the config file, then QSS_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    check_fraction: Option<f64>,
    #[arg(long)]
    corruption_threshold: Option<f64>,
    #[arg(long)]
    link_noise: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

struct Resolved {
    protocol: ProtocolConfig,
    out: PathBuf,
    format: Format,
}

impl SessionArgs {
    fn resolve(&self, default_check: f64) -> Result<Resolved, CliError> {
        let file = FileConfig::load(self.config.as_deref())?;
        let d = self.d.or(file.d).unwrap_or(3);
        let d = Dimension::new(d)?;
        let mut p = ProtocolConfig::new(d, self.recipients.or(file.recipients).unwrap_or(2));
        p.n_rounds = self.rounds.or(file.rounds).unwrap_or(10_000);
        p.seed = resolve_seed(self.seed, file.seed)?;
        p.check_fraction = self.check_fraction.or(file.check_fraction).unwrap_or(default_check);
        p.corruption_threshold = self
            .corruption_threshold
            .or(file.corruption_threshold)
            .unwrap_or(0.0);
        p.link_noise = self.link_noise.or(file.link_noise).unwrap_or(0.0);
        p.validate()?;
        let format = match (self.format, file.format.as_deref()) {
            (Some(f), _) => f,
            (None, Some(s)) => Format::from_str(s, true).map_err(|_| CliError::Config(format!("unknown format `{s}`")))?,
            (None, None) => Format::Jsonl,
        };
        let out = self.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("."));
        Ok(Resolved { protocol: p, out, format })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    session: SessionArgs,
}

#[derive(Args)]
struct AttackArgs {
    /// Attack to install (see the registry: intercept-resend, substitute-qudit, multi-pulse, none).
    #[arg(long)]
    kind: String,
    /// Link to attack; for multi-pulse the recipient whose gate is probed.
    #[arg(long)]
    link: Option<usize>,
    /// Eve's basis: `uniform` or a fixed basis index.
    #[arg(long, default_value = "uniform")]
    basis: String,
    /// Per-round particle-number check probability (multi-pulse countermeasure).
    #[arg(long, default_value_t = 0.0)]
    num_check: f64,
    #[command(flatten)]
    session: SessionArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Recipient counts.
    #[arg(long = "N", value_delimiter = ',', default_value = "10")]
    n: Vec<u32>,
    /// Dimensions (any integer >= 2 for the formulas).
    #[arg(long, value_delimiter = ',', default_value = "23")]
    d: Vec<u32>,
    /// Target success probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0.8")]
    p: Vec<f64>,
    /// Detector efficiencies.
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    eta: Vec<f64>,
    /// Also run the exhaustive MUB check for each dimension.
    #[arg(long)]
    verify_mubs: bool,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,11,13")]
    d: Vec<u32>,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|t| t.as_secs())
        .unwrap_or(0)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn write_transcripts(t: &qss_core::SessionTranscript, r: &Resolved) -> Result<(), CliError> {
    let stamp = now();
    for (view, name) in [
        (TranscriptView::Full, "transcript.full.jsonl"),
        (TranscriptView::Public, "transcript.public.jsonl"),
    ] {
        let path = r.out.join(name);
        let mut w = create(&path)?;
        write_jsonl(t, view, stamp, &mut w).map_err(io_err(&path))?;
        w.flush().map_err(io_err(&path))?;
        info!("wrote {}", path.display());
    }
    if r.format == Format::Csv {
        let path = r.out.join("summary.csv");
        let mut w = create(&path)?;
        write_summary_csv(&aggregate(std::slice::from_ref(t)), &mut w).map_err(io_err(&path))?;
        w.flush().map_err(io_err(&path))?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<u8, CliError> {
    let r = args.session.resolve(0.1)?;
    info!("running {:?}", r.protocol);
    let t = run_session(&r.protocol, &mut TapSet::empty())?;
    write_transcripts(&t, &r)?;
    let verdict = match t.verdict {
        Verdict::Clean => "clean",
        Verdict::Corrupt => "corrupt",
    };
    println!("verdict: {verdict}");
    println!("rounds: {}", t.rounds.len());
    println!("valid_rate: {:.6}", t.valid_fraction());
    println!("violation_rate: {:.6}", t.observed_violation_rate);
    println!("secret_digits: {}", t.secret_stream.len());
    Ok(if t.verdict == Verdict::Corrupt { EXIT_CORRUPT } else { 0 })
}

fn parse_basis(s: &str) -> Result<BasisStrategy, CliError> {
    if s.eq_ignore_ascii_case("uniform") {
        return Ok(BasisStrategy::UniformRandom);
    }
    s.parse()
        .map(BasisStrategy::Fixed)
        .map_err(|_| CliError::Config(format!("basis must be `uniform` or an index, got `{s}`")))
}

fn cmd_attack(args: AttackArgs) -> Result<u8, CliError> {
    let registry = AttackRegistry::builtin();
    let model = registry.get(&args.kind)?;
    let r = args.session.resolve(0.5)?;
    let link = args.link.unwrap_or(match model.kind() {
        qss_core::adversary::AttackKind::MultiPulse => 2,
        _ => 1,
    });
    let adv = AdversaryConfig {
        kind: model.kind(),
        link,
        basis_strategy: parse_basis(&args.basis)?,
        num_check_probability: args.num_check,
    };
    let outcome = evaluate_attack_with(&registry, &r.protocol, &adv, r.protocol.n_rounds)?;
    let rep = &outcome.report;

    let path = r.out.join(match r.format {
        Format::Jsonl => "attack_report.jsonl",
        Format::Csv => "attack_report.csv",
    });
    let mut w = create(&path)?;
    match r.format {
        Format::Jsonl => writeln!(w, "{}", rep.to_json()),
        Format::Csv => {
            let row = SummaryRow {
                scheme: format!("single_qudit/{}", rep.kind),
                d: r.protocol.d.get(),
                n: r.protocol.n_recipients,
                metric: "detection_rate".into(),
                value: rep.detection_rate,
                ci_low: rep.ci_low,
                ci_high: rep.ci_high,
                n_samples: rep.n_samples,
            };
            let guess = SummaryRow {
                metric: "guess_rate".into(),
                value: rep.guess_rate,
                ci_low: rep.guess_rate,
                ci_high: rep.guess_rate,
                n_samples: rep.valid_rounds,
                ..row.clone()
            };
            write_summary_csv(&[row, guess], &mut w)
        }
    }
    .and_then(|_| w.flush())
    .map_err(io_err(&path))?;
    info!("wrote {}", path.display());

    println!("kind: {}", rep.kind);
    println!("link: {}", rep.link);
    println!("rounds: {}", rep.rounds);
    println!("guess_rate: {:.6}", rep.guess_rate);
    println!(
        "detection_rate: {:.6} [{:.6}, {:.6}] over {} samples",
        rep.detection_rate, rep.ci_low, rep.ci_high, rep.n_samples
    );
    println!("detected: {}", rep.detected);
    Ok(0)
}

fn exact_row(scheme: &str, d: u32, n: u32, metric: String, value: f64) -> SummaryRow {
    SummaryRow {
        scheme: scheme.into(),
        d,
        n: n as usize,
        metric,
        value,
        ci_low: value,
        ci_high: value,
        n_samples: 0,
    }
}

fn cmd_compare(args: CompareArgs) -> Result<u8, CliError> {
    let mut rows = Vec::new();
    for &n in &args.n {
        for &d in &args.d {
            for &p in &args.p {
                let m = qkd_rounds(n, d, p)?;
                rows.push(exact_row("qkd", d, n, format!("rounds@p={p}"), m as f64));
                rows.push(exact_row("qkd", d, n, format!("success@m={m}"), qkd_success(n, d, m)?));
            }
            for &eta in &args.eta {
                for scheme in Scheme::ALL {
                    let v = detection_scaling(scheme, n, eta)?;
                    rows.push(exact_row(scheme.as_str(), d, n, format!("detection_scaling@eta={eta}"), v));
                }
            }
        }
    }

    let mut all_pass = true;
    if args.verify_mubs {
        for &d in &args.d {
            let dim = Dimension::new(d)?;
            let rep = verify_mubs(dim);
            all_pass &= rep.passed();
            rows.push(exact_row("mub", d, 0, "max_unbiased_error".into(), rep.max_unbiased_error));
            rows.push(exact_row("mub", d, 0, "cyclic_failures".into(), rep.cyclic_failures as f64));
            eprintln!(
                "verify-mubs d={d}: {} ({} unbiased pairs, {} cyclic cases)",
                if rep.passed() { "pass" } else { "FAIL" },
                rep.unbiased_pairs,
                rep.cyclic_cases
            );
        }
    }

    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_summary_csv(&rows, &mut w).and_then(|_| w.flush()).map_err(io_err(path))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            writeln!(w, "{SUMMARY_HEADER}").map_err(|e| CliError::Io(e.to_string()))?;
            for r in &rows {
                writeln!(w, "{}", r.to_csv()).map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
    }
    if all_pass {
        Ok(0)
    } else {
        Err(CliError::Check("MUB verification failed".into()))
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let mut failed = Vec::new();
    for &d in &args.d {
        let rep = verify_mubs(Dimension::new(d)?);
        println!("{}", serde_json::to_string(&rep).map_err(|e| CliError::Io(e.to_string()))?);
        if !rep.passed() {
            failed.push(d);
        }
    }
    if failed.is_empty() {
        Ok(0)
    } else {
        Err(CliError::Check(format!("dimensions {failed:?}")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Compare(a) => cmd_compare(a),
        Command::VerifyMubs(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qss: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => EXIT_CONFIG,
                CliError::Io(_) => EXIT_IO,
                CliError::Check(_) => 1,
            })
        }
    }
}
