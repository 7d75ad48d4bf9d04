use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sdc_core::metrics::{efficiency_curve, min_n_for_target, resource_counts};
use sdc_core::protocol::{simulate, simulate_with, MessageSource};
use sdc_core::selftest::{run_selftest, Fault};
use sdc_core::AnalyzerKind;

const CSV_HEADER: &str = "N,analyzer,R_analytic,R_mc,mc_shots,ci95_low,ci95_high";

#[derive(Parser)]
#[command(
    name = "sdc",
    version,
    about = "Superdense coding with Zeno-gate Bell-state analyzers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Throughput efficiency over a range of cycle counts
    Sweep(SweepArgs),
    /// Monte-Carlo session at one cycle count
    Run(RunArgs),
    /// Cycles and resources needed to reach a target throughput
    Compare(CompareArgs),
    /// Run the invariant suite
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnalyzerArg {
    Dqz,
    Ifm,
    Qz,
    All,
}

impl AnalyzerArg {
    fn kinds(self) -> Vec<AnalyzerKind> {
        match self {
            AnalyzerArg::Dqz => vec![AnalyzerKind::Dqz],
            AnalyzerArg::Ifm => vec![AnalyzerKind::Ifm],
            AnalyzerArg::Qz => vec![AnalyzerKind::Qz],
            AnalyzerArg::All => AnalyzerKind::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "all")]
    analyzer: AnalyzerArg,
    #[arg(long, default_value_t = 1)]
    n_min: u32,
    #[arg(long, default_value_t = 100)]
    n_max: u32,
    /// Monte-Carlo shots per row; 0 skips the simulation
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "dqz")]
    analyzer: AnalyzerArg,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// 00, 01, 10, 11 or uniform
    #[arg(long, default_value = "uniform", value_parser = parse_message)]
    message: MessageSource,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, default_value_t = 1.8)]
    target_r: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    KSign,
}

fn parse_message(s: &str) -> Result<MessageSource, String> {
    s.parse()
        .map_err(|_| format!("expected 00, 01, 10, 11 or uniform, got {s:?}"))
}

enum Failure {
    Usage(String),
    Io(io::Error),
    Selftest,
}

impl From<sdc_core::Error> for Failure {
    fn from(e: sdc_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(Failure::Io),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(Failure::Io),
    }
}

#[derive(Serialize)]
struct SweepRow {
    n: u32,
    analyzer: String,
    r_analytic: f64,
    r_mc: Option<f64>,
    mc_shots: Option<u64>,
    ci95_low: Option<f64>,
    ci95_high: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.10}")).unwrap_or_default()
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for kind in args.analyzer.kinds() {
        let curve = efficiency_curve(kind, args.n_min, args.n_max)?;
        for (n, r) in curve.points {
            let mut row = SweepRow {
                n,
                analyzer: kind.to_string(),
                r_analytic: r,
                r_mc: None,
                mc_shots: None,
                ci95_low: None,
                ci95_high: None,
            };
            if args.shots > 0 {
                let est = simulate(kind, n, args.shots, args.seed)?;
                row.r_mc = Some(est.r_hat);
                row.mc_shots = Some(est.shots);
                row.ci95_low = Some(est.ci95.0);
                row.ci95_high = Some(est.ci95.1);
            }
            rows.push(row);
        }
    }
    let text = match args.output.format {
        Format::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for r in &rows {
                let shots = r.mc_shots.map(|x| x.to_string()).unwrap_or_default();
                writeln!(
                    s,
                    "{},{},{:.10},{},{},{},{}",
                    r.n,
                    r.analyzer,
                    r.r_analytic,
                    opt(r.r_mc),
                    shots,
                    opt(r.ci95_low),
                    opt(r.ci95_high)
                )
                .expect("string write");
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("serializable") + "\n",
    };
    emit(args.output.out.as_ref(), &text)
}

#[derive(Serialize)]
struct RunRecord {
    analyzer: String,
    n: u32,
    shots: u64,
    seed: u64,
    r_hat: f64,
    ci95: [f64; 2],
    lost_fraction: f64,
    decode_error_count: u64,
}

fn run(args: RunArgs) -> Result<(), Failure> {
    if args.shots == 0 {
        return Err(Failure::Usage("--shots must be at least 1".into()));
    }
    let mut records = Vec::new();
    for kind in args.analyzer.kinds() {
        let est = simulate_with(kind, args.n, args.shots, args.seed, args.message)?;
        records.push(RunRecord {
            analyzer: kind.to_string(),
            n: args.n,
            shots: est.shots,
            seed: args.seed,
            r_hat: est.r_hat,
            ci95: [est.ci95.0, est.ci95.1],
            lost_fraction: est.lost_fraction(),
            decode_error_count: est.decode_errors,
        });
    }
    let text = if records.len() == 1 {
        serde_json::to_string_pretty(&records[0])
    } else {
        serde_json::to_string_pretty(&records)
    }
    .expect("serializable");
    emit(args.out.as_ref(), &(text + "\n"))
}

#[derive(Serialize)]
struct CompareRow {
    analyzer: String,
    n: u32,
    beamsplitters: u64,
    ancilla: bool,
}

fn compare(args: CompareArgs) -> Result<(), Failure> {
    let t = args.target_r;
    if !(t > 0.0 && t < 2.0) {
        return Err(Failure::Usage(format!("--target-r must lie in (0, 2), got {t}")));
    }
    let mut rows = Vec::new();
    for kind in [AnalyzerKind::Qz, AnalyzerKind::Ifm, AnalyzerKind::Dqz] {
        let n = min_n_for_target(kind, t)?;
        let res = resource_counts(kind, n)?;
        rows.push(CompareRow {
            analyzer: kind.to_string(),
            n,
            beamsplitters: res.beamsplitters,
            ancilla: res.needs_ancilla,
        });
    }
    let text = match args.output.format {
        Format::Csv => {
            let mut s = String::from("analyzer,N,beamsplitters,ancilla\n");
            for r in &rows {
                let anc = if r.ancilla { "yes" } else { "no" };
                writeln!(s, "{},{},{},{anc}", r.analyzer, r.n, r.beamsplitters).expect("string write");
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("serializable") + "\n",
    };
    emit(args.output.out.as_ref(), &text)
}

fn selftest(args: SelftestArgs) -> Result<(), Failure> {
    let fault = args.inject_fault.map(|FaultArg::KSign| Fault::KSign);
    let results = run_selftest(fault);
    let mut stdout = io::stdout().lock();
    for r in &results {
        writeln!(stdout, "{r}").map_err(Failure::Io)?;
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        eprintln!("selftest failed: {}", failed.join(", "));
        Err(Failure::Selftest)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SDC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("SDC_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
        Command::Selftest(a) => selftest(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Selftest) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
