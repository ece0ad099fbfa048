//! Command-line front end.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 bad arguments or
//! input, 3 memory exceeded `--memory-bound`, 4 no period within the horizon,
//! 5 table verification failed, 6 analysis limit (modulus beyond 64 bits,
//! unfactorable order, numerators unstable at the requested precision).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dvfcsr::analysis::{theorem2_report_with, AnalysisError};
use dvfcsr::connection::analyze;
use dvfcsr::fixtures::{self, Fixture};
use dvfcsr::register::RegisterError;
use dvfcsr::search::{check_table1, search, Candidate, SearchConfig};
use dvfcsr::tables::{parse_table1, SequenceTable};
use dvfcsr::GroundParams;
use num_bigint::BigInt;

#[derive(Parser)]
#[command(name = "dvfcsr", version, about = "Vectorial FCSRs with ramified carries over F_p[beta]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a register and write its trace as CSV (one row per series).
    Run(RunArgs),
    /// Print the connection integer, M, M' and the norms as JSON.
    Analyze(AnalyzeArgs),
    /// Measure all periods and check them against ord_|N'|(p).
    Period(PeriodArgs),
    /// Enumerate connection grids and evaluate the norm form.
    Search(SearchArgs),
    /// Check the norm-form table and replay the first example's trace.
    VerifyTables(VerifyArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with "spec" and optional "state".
    input: PathBuf,
    #[arg(long, default_value_t = 36)]
    steps: usize,
    /// Fail with exit code 3 once a memory coordinate exceeds this in absolute value.
    #[arg(long)]
    memory_bound: Option<String>,
    /// Prefix the CSV with a `# dvfcsr <version>` line.
    #[arg(long)]
    banner: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Args)]
struct PeriodArgs {
    input: PathBuf,
    /// Steps allowed for finding a repeated state (default 4*d*ord + 64).
    #[arg(long)]
    horizon: Option<usize>,
    /// p-adic digits used to recover the numerators behind the reduced denominators.
    #[arg(long)]
    precision: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Integer lift of the primitive polynomial, constant term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,-1,1")]
    poly: Vec<i64>,
    /// Same bound for every grid entry.
    #[arg(long, conflicts_with = "bounds")]
    bound: Option<u64>,
    /// Per-entry bounds, rows by power of pi: "6,6;3,3".
    #[arg(long)]
    bounds: Option<String>,
    /// Also enumerate negative grid entries.
    #[arg(long)]
    signed: bool,
    #[arg(long)]
    prime: bool,
    #[arg(long)]
    primitive_root: bool,
    /// Keep only gcd(d, |N'| - 1) = 1.
    #[arg(long)]
    gcd_d: bool,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, value_enum, default_value_t = SearchFormat::Csv)]
    format: SearchFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Norm-form table CSV (N_prime,x,y,z,t); the bundled one by default.
    #[arg(long)]
    table1: Option<PathBuf>,
    /// Trace CSV of the first example; the bundled one by default.
    #[arg(long)]
    table2: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    Write(String),
    Input(String),
    Diverged(String),
    Undetermined(String),
    Verification,
    Limit(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Write(_) => 1,
            Failure::Input(_) => 2,
            Failure::Diverged(_) => 3,
            Failure::Undetermined(_) => 4,
            Failure::Verification => 5,
            Failure::Limit(_) => 6,
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Undetermined(_) => Failure::Undetermined(e.to_string()),
            AnalysisError::Register(r) => r.into(),
            AnalysisError::ModulusTooLarge(_) | AnalysisError::FactorizationBudget(_) | AnalysisError::PrecisionTooLow(_) => {
                Failure::Limit(e.to_string())
            }
            AnalysisError::NotCoprime { .. } | AnalysisError::ModulusTooSmall(_) => Failure::Input(e.to_string()),
        }
    }
}

impl From<RegisterError> for Failure {
    fn from(e: RegisterError) -> Self {
        match e {
            RegisterError::MemoryDiverged { .. } => Failure::Diverged(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match &cli.command {
        Command::Run(a) => (run(a), &a.out),
        Command::Analyze(a) => (analyze_cmd(a), &a.out),
        Command::Period(a) => (period(a), &a.out),
        Command::Search(a) => (search_cmd(a), &a.out),
        Command::VerifyTables(a) => (verify_tables(a), &a.out),
    };
    // verification failures still emit their per-row report
    let (text, failure) = match result {
        Ok(text) => (Some(text), None),
        Err((text, f)) => (text, Some(f)),
    };
    if let Some(text) = text {
        if let Err(f) = emit(output, &text) {
            return report(f);
        }
    }
    match failure {
        Some(f) => report(f),
        None => ExitCode::SUCCESS,
    }
}

fn report(f: Failure) -> ExitCode {
    match &f {
        Failure::Write(m) | Failure::Input(m) | Failure::Diverged(m) | Failure::Undetermined(m) | Failure::Limit(m) => {
            eprintln!("error: {m}")
        }
        Failure::Verification => eprintln!("error: verification failed"),
    }
    ExitCode::from(f.code())
}

type Outcome = Result<String, (Option<String>, Failure)>;

fn fail<T>(f: Failure) -> Result<T, (Option<String>, Failure)> {
    Err((None, f))
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    let result = match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("stdout: {e}"))
        }
    };
    result.map_err(Failure::Write)
}

fn check_output_path(out: &OutputArgs) -> Result<(), (Option<String>, Failure)> {
    if let Some(parent) = out.output.as_deref().and_then(Path::parent) {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            return fail(Failure::Input(format!("output directory {} does not exist", parent.display())));
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, (Option<String>, Failure)> {
    fs::read_to_string(path).map_err(|e| (None, Failure::Input(format!("{}: {e}", path.display()))))
}

fn load_fixture(path: &Path) -> Result<Fixture, (Option<String>, Failure)> {
    Fixture::parse(&read_text(path)?).map_err(|e| (None, Failure::Input(format!("{}: {e}", path.display()))))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn run(a: &RunArgs) -> Outcome {
    check_output_path(&a.out)?;
    let fixture = load_fixture(&a.input)?;
    let bound = match &a.memory_bound {
        Some(b) => Some(
            BigInt::from_str(b.trim()).map_err(|_| (None, Failure::Input(format!("bad memory bound {b:?}"))))?,
        ),
        None => None,
    };
    let table = SequenceTable::from_run(&fixture.spec, &fixture.initial_state(), a.steps, bound.as_ref())
        .map_err(|e| (None, Failure::from(e)))?;
    let mut text = String::new();
    if a.banner {
        text.push_str(&format!("# dvfcsr {}\n", env!("CARGO_PKG_VERSION")));
    }
    text.push_str(&table.to_csv_string());
    Ok(text)
}

fn analyze_cmd(a: &AnalyzeArgs) -> Outcome {
    check_output_path(&a.out)?;
    let fixture = load_fixture(&a.input)?;
    Ok(to_json(&analyze(&fixture.spec)))
}

fn period(a: &PeriodArgs) -> Outcome {
    check_output_path(&a.out)?;
    let fixture = load_fixture(&a.input)?;
    let report = theorem2_report_with(&fixture.spec, &fixture.initial_state(), a.horizon, a.precision)
        .map_err(|e| (None, Failure::from(e)))?;
    Ok(match a.format {
        ReportFormat::Table => report.render_table(),
        ReportFormat::Json => to_json(&report),
    })
}

fn parse_bounds(text: &str) -> Result<Vec<Vec<u64>>, String> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<u64>().map_err(|_| format!("bad bound {v:?} in {text:?}")))
                .collect()
        })
        .collect()
}

fn search_cmd(a: &SearchArgs) -> Outcome {
    check_output_path(&a.out)?;
    let ground = GroundParams::new(a.p, a.d, &a.poly).map_err(|e| (None, Failure::Input(e.to_string())))?;
    let mut config = match &a.bounds {
        Some(text) => {
            let bounds = parse_bounds(text).map_err(|e| (None, Failure::Input(e)))?;
            SearchConfig::new(ground, bounds, a.signed).map_err(|e| (None, Failure::Input(e.to_string())))?
        }
        None => SearchConfig::uniform(ground, a.bound.unwrap_or(3), a.signed),
    };
    config.filters.require_prime = a.prime;
    config.filters.require_primitive_root = a.primitive_root;
    config.filters.require_gcd_d = a.gcd_d;
    config.limit = a.limit;
    let found = search(&config);
    Ok(match a.format {
        SearchFormat::Json => to_json(&found),
        SearchFormat::Csv => candidates_csv(&config, &found),
    })
}

fn candidates_csv(config: &SearchConfig, found: &[Candidate]) -> String {
    let g = config.ground();
    let (d, n) = (g.d(), g.n());
    let mut header = vec!["N_prime".to_string()];
    let mut names = vec![String::new(); d * n];
    for k in 0..d {
        for j in 0..n {
            names[dvfcsr::basis_index(d, k, j)] = format!("q_{k}_{j}");
        }
    }
    header.extend(names);
    header.extend(["is_prime", "primitive_root", "gcd_ok", "ord", "predicted_period"].map(String::from));
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(&header).expect("writing to memory");
    let opt = |v: Option<u64>| v.map_or_else(String::new, |x| x.to_string());
    for c in found {
        let mut record = vec![c.n_prime.to_string()];
        record.extend(c.args.iter().map(i64::to_string));
        record.push(c.is_prime.to_string());
        record.push(c.is_primitive_root.to_string());
        record.push(c.gcd_ok.to_string());
        record.push(opt(c.ord));
        record.push(opt(c.predicted_max_period));
        wtr.write_record(&record).expect("writing to memory");
    }
    String::from_utf8(wtr.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

fn verify_tables(a: &VerifyArgs) -> Outcome {
    check_output_path(&a.out)?;
    let table1 = match &a.table1 {
        Some(path) => parse_table1(read_text(path)?.as_bytes())
            .map_err(|e| (None, Failure::Input(format!("{}: {e}", path.display()))))?,
        None => fixtures::table1(),
    };
    let table2 = match &a.table2 {
        Some(path) => SequenceTable::parse(read_text(path)?.as_bytes())
            .map_err(|e| (None, Failure::Input(format!("{}: {e}", path.display()))))?,
        None => fixtures::table2(),
    };

    let mut text = String::new();
    let mut failures = 0;
    let checks = check_table1(&table1);
    for c in &checks {
        text.push_str("table1 ");
        text.push_str(&c.summary_line());
        text.push('\n');
        failures += usize::from(!c.passed());
    }
    let composites = checks.iter().filter(|c| !c.is_prime).count();

    let example = fixtures::example1();
    let replay = SequenceTable::from_run(&example.spec, &example.initial_state(), table2.columns(), None)
        .map_err(|e| (None, Failure::from(e)))?;
    let diff = replay.diff(&table2);
    for (series, _) in table2.rows() {
        let bad: Vec<_> = diff.iter().filter(|m| &m.series == series).collect();
        if bad.is_empty() {
            text.push_str(&format!("table2 PASS {series}: {} columns match\n", table2.columns()));
        } else {
            failures += 1;
            let cells: Vec<String> = bad
                .iter()
                .map(|m| {
                    let got = m.got.as_ref().map_or_else(|| "missing".to_string(), BigInt::to_string);
                    let want = m.expected.as_ref().map_or_else(|| "missing".to_string(), BigInt::to_string);
                    format!("column {}: expected {want}, got {got}", m.column)
                })
                .collect();
            text.push_str(&format!("table2 FAIL {series}: {}\n", cells.join("; ")));
        }
    }
    text.push_str(&format!(
        "summary: {} table1 rows ({} passed, {composites} composite), {} table2 series x {} columns, {failures} failures\n",
        checks.len(),
        checks.iter().filter(|c| c.passed()).count(),
        table2.rows().len(),
        table2.columns(),
    ));
    if failures > 0 {
        Err((Some(text), Failure::Verification))
    } else {
        Ok(text)
    }
}
