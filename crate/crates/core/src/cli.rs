//! Command-line front end: `gen`, `fit`, `experiment` and `verify`.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 invalid input,
//! 3 search budget exhausted, 4 empty noise-free locus during digit peeling.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fp::PrimeModulus;
use crate::instance_file::{FileError, InstanceFile};
use crate::modp::{linear_regression_mod_p, regime_check, GateScale, RegressConfig, Regime, RunStats};
use crate::padic::trailing_digits_regression;
use crate::seeding::case_seed;
use crate::synth::{gen_modp_instance, gen_padic_instance};
use crate::zp::ZpTrunc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_EMPTY_LOCUS: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "padic-linreg", version, about = "Robust linear regression over F_p and Z/p^E")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic instance as JSON lines.
    Gen(GenArgs),
    /// Fit an instance file and print the coefficient vector.
    Fit(FitArgs),
    /// Generate and fit a batch of seeded cases.
    Experiment(ExperimentArgs),
    /// Compare a fitted vector with the truth stored in an instance file.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long = "D")]
    pub dim: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Precision; produces a digitwise-noise p-adic instance when given.
    #[arg(long = "E")]
    pub precision: Option<u32>,
    /// Output path (standard output when omitted).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    RowCount,
    Codimension,
}

impl From<GateArg> for GateScale {
    fn from(g: GateArg) -> Self {
        match g {
            GateArg::RowCount => GateScale::RowCount,
            GateArg::Codimension => GateScale::Codimension,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    pub rep: usize,
    #[arg(long)]
    pub max_restarts: Option<u64>,
    /// Assumed noise rate for the default restart budget.
    #[arg(long, default_value_t = 0.05)]
    pub noise_bound: f64,
    #[arg(long)]
    pub max_draws: Option<u64>,
    #[arg(long, value_enum, default_value_t = GateArg::Codimension)]
    pub gate: GateArg,
}

impl SearchArgs {
    fn config(&self, seed: u64) -> RegressConfig {
        RegressConfig {
            rep: self.rep,
            max_restarts: self.max_restarts,
            seed,
            noise_bound: self.noise_bound,
            max_draws: self.max_draws,
            gate: self.gate.into(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long = "D")]
    pub dim: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long = "E")]
    pub precision: Option<u32>,
    #[arg(long, default_value_t = 10)]
    pub cases: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    /// JSON produced by `fit`.
    #[arg(long, conflicts_with = "c", required_unless_present = "c")]
    pub fit: Option<PathBuf>,
    /// Comma-separated coefficients.
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<String>>,
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub p: u64,
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    pub rep: usize,
    pub cases: u64,
    pub seed: u64,
    pub max_restarts: Option<u64>,
    pub noise_bound: f64,
    pub max_draws: Option<u64>,
    pub gate: GateScale,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub case: u64,
    pub c0: u64,
    pub c1: u64,
    pub success: bool,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub parameters: ExperimentParams,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    /// CSV with a leading `# {parameters as JSON}` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# {}\n",
            serde_json::to_string(&self.parameters).expect("parameters serialize")
        );
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(["case", "c0", "c1", "success", "elapsed_ms"])
            .expect("in-memory csv");
        for row in &self.rows {
            w.serialize(row).expect("in-memory csv");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let (first, rest) = text.split_once('\n').ok_or("missing parameter line")?;
        let json = first.strip_prefix("# ").ok_or("missing parameter line")?;
        let parameters = serde_json::from_str(json).map_err(|e| e.to_string())?;
        let mut reader = csv::Reader::from_reader(rest.as_bytes());
        let rows = reader
            .deserialize()
            .collect::<Result<Vec<ReportRow>, _>>()
            .map_err(|e| e.to_string())?;
        Ok(Self { parameters, rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The same report with all timings zeroed.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.rows.iter_mut().for_each(|row| row.elapsed_ms = 0);
        r
    }
}

fn budget_stats(err: &Error) -> RunStats {
    match err {
        Error::RestartBudgetExhausted { stats } | Error::TrialBudgetExhausted { stats, .. } => *stats,
        _ => RunStats::default(),
    }
}

fn run_case(params: &ExperimentParams, case: u64) -> ReportRow {
    let seed = case_seed(params.seed, case);
    let config = RegressConfig {
        rep: params.rep,
        max_restarts: params.max_restarts,
        seed,
        noise_bound: params.noise_bound,
        max_draws: params.max_draws,
        gate: params.gate,
    };
    let start = Instant::now();
    let p = PrimeModulus::new(params.p).expect("validated before running cases");
    let (stats, success) = match params.precision {
        None => {
            let inst = gen_modp_instance(p, params.dim, params.n, params.r, seed).expect("validated");
            match linear_regression_mod_p(&inst.dataset, &config) {
                Ok(fit) => (fit.stats, fit.coefficients == inst.truth),
                Err(e) => (budget_stats(&e), false),
            }
        }
        Some(e) => {
            let inst = gen_padic_instance(p, params.dim, e, params.n, params.r, seed).expect("validated");
            match trailing_digits_regression(&inst.dataset, &config) {
                Ok(fit) => (fit.total_stats(), fit.coefficients == inst.truth),
                Err(e) => (budget_stats(&e), false),
            }
        }
    };
    ReportRow {
        case,
        c0: stats.c0,
        c1: stats.c1,
        success,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

fn validate_params(params: &ExperimentParams) -> Result<(), Error> {
    PrimeModulus::new(params.p)?;
    if !(0.0..1.0).contains(&params.r) {
        return Err(Error::InvalidParameter(format!("noise rate {} outside [0, 1)", params.r)));
    }
    if params.n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if params.rep == 0 {
        return Err(Error::InvalidParameter("rep must be at least 1".into()));
    }
    if params.precision == Some(0) {
        return Err(Error::InvalidParameter("E must be at least 1".into()));
    }
    Ok(())
}

/// Runs every case (in parallel) and returns rows ordered by case id.
pub fn run_experiment(params: &ExperimentParams) -> Result<ExperimentReport, Error> {
    validate_params(params)?;
    let rows = (0..params.cases)
        .into_par_iter()
        .map(|case| run_case(params, case))
        .collect();
    Ok(ExperimentReport {
        parameters: params.clone(),
        rows,
    })
}

/// Output of `fit`. Coefficients are exact JSON integers of any size.
#[derive(Debug, Serialize, Deserialize)]
struct FitOutput {
    c: Vec<serde_json::Value>,
    #[serde(default)]
    c0: u64,
    #[serde(default)]
    c1: u64,
}

fn coefficient_json(v: &impl ToString) -> serde_json::Value {
    let n: serde_json::Number = v.to_string().parse().expect("decimal integer");
    serde_json::Value::Number(n)
}

/// Accepts integers or decimal strings.
fn parse_coefficient(v: &serde_json::Value) -> Option<BigUint> {
    match v {
        serde_json::Value::Number(n) => n.to_string().parse().ok(),
        serde_json::Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn load_instance(path: &Path) -> Result<InstanceFile, FileError> {
    InstanceFile::read_from(BufReader::new(File::open(path)?))
}

fn warn_regime(p: PrimeModulus, dim: usize, n: usize, err: &mut dyn Write) {
    if regime_check(p, dim, n) == Regime::Warning {
        let _ = writeln!(
            err,
            "warning: D = {dim} <= 2 floor(log_{p} {n}); the consensus gate is weak here and the search may not terminate"
        );
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::RestartBudgetExhausted { .. } | Error::TrialBudgetExhausted { .. } => EXIT_BUDGET,
        Error::EmptyLocus { .. } => EXIT_EMPTY_LOCUS,
        _ => EXIT_INVALID,
    }
}

fn open_output<'a>(path: Option<&Path>, out: &'a mut dyn Write) -> std::io::Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(out)),
    })
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let p = match PrimeModulus::new(args.p) {
        Ok(p) => p,
        Err(_) => {
            let _ = writeln!(err, "error: modulus is not prime: {}", args.p);
            return EXIT_INVALID;
        }
    };
    let file = match args.precision {
        None => gen_modp_instance(p, args.dim, args.n, args.r, args.seed).map(|i| InstanceFile::from(&i)),
        Some(e) => gen_padic_instance(p, args.dim, e, args.n, args.r, args.seed).map(|i| InstanceFile::from(&i)),
    };
    let file = match file {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let written = open_output(args.out.as_deref(), out)
        .map_err(FileError::from)
        .and_then(|w| file.write_to(w));
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn cmd_fit(args: &FitArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let file = match load_instance(&args.instance) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let config = args.search.config(args.seed);
    let p = PrimeModulus::new(file.header.p).expect("validated on read");
    warn_regime(p, file.header.dim, file.header.n, err);
    let result = file.padic_dataset().and_then(|data| {
        if file.header.precision == 1 {
            let fit = linear_regression_mod_p(&data.reduce_mod_p(), &config)?;
            Ok(FitOutput {
                c: fit
                    .coefficients
                    .as_slice()
                    .iter()
                    .map(coefficient_json)
                    .collect(),
                c0: fit.stats.c0,
                c1: fit.stats.c1,
            })
        } else {
            let fit = trailing_digits_regression(&data, &config)?;
            let stats = fit.total_stats();
            Ok(FitOutput {
                c: fit
                    .coefficients
                    .iter()
                    .map(coefficient_json)
                    .collect(),
                c0: stats.c0,
                c1: stats.c1,
            })
        }
    });
    match result {
        Ok(fit) => {
            let _ = writeln!(out, "{}", serde_json::to_string(&fit).expect("fit serializes"));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_experiment(args: &ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let params = ExperimentParams {
        p: args.p,
        dim: args.dim,
        n: args.n,
        r: args.r,
        precision: args.precision,
        rep: args.search.rep,
        cases: args.cases,
        seed: args.seed,
        max_restarts: args.search.max_restarts,
        noise_bound: args.search.noise_bound,
        max_draws: args.search.max_draws,
        gate: args.search.gate.into(),
    };
    if let Ok(p) = PrimeModulus::new(args.p) {
        warn_regime(p, args.dim, args.n, err);
    }
    let report = match run_experiment(&params) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let text = match args.format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => report.to_json(),
    };
    let written = open_output(args.out.as_deref(), out).and_then(|mut w| {
        w.write_all(text.as_bytes())?;
        w.flush()
    });
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn read_fitted(args: &VerifyArgs) -> Result<Vec<BigUint>, String> {
    let values: Vec<serde_json::Value> = match (&args.fit, &args.c) {
        (Some(path), _) => {
            let mut text = String::new();
            File::open(path)
                .and_then(|mut f| f.read_to_string(&mut text))
                .map_err(|e| e.to_string())?;
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .ok_or("empty fit file")?;
            serde_json::from_str::<FitOutput>(line).map_err(|e| e.to_string())?.c
        }
        (None, Some(c)) => c.iter().map(|s| serde_json::Value::String(s.clone())).collect(),
        (None, None) => return Err("no fitted vector given".into()),
    };
    values
        .iter()
        .map(|v| parse_coefficient(v).ok_or_else(|| format!("not a non-negative integer: {v}")))
        .collect()
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let file = match load_instance(&args.instance) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let truth = match file.truth() {
        Ok(Some(t)) => t,
        Ok(None) => {
            let _ = writeln!(err, "error: instance file stores no ground truth");
            return EXIT_INVALID;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let fitted = match read_fitted(args) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    if fitted.len() != truth.len() {
        let _ = writeln!(
            err,
            "error: fitted vector has {} coordinates, truth has {}",
            fitted.len(),
            truth.len()
        );
        return EXIT_INVALID;
    }
    let p = file.prime().expect("validated on read");
    for (k, (f, t)) in fitted.iter().zip(&truth).enumerate() {
        let f = ZpTrunc::from_biguint(p, file.header.precision, f);
        if &f != t {
            let _ = writeln!(err, "mismatch at coordinate {k}: expected {t}, found {f}");
            return EXIT_MISMATCH;
        }
    }
    let _ = writeln!(out, "ok");
    EXIT_OK
}

/// Executes a parsed command line, writing results to `out` and diagnostics
/// to `err`, and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, out, err),
        Command::Fit(a) => cmd_fit(a, out, err),
        Command::Experiment(a) => cmd_experiment(a, out, err),
        Command::Verify(a) => cmd_verify(a, out, err),
    }
}

/// Parses `argv` and runs it; argument errors map to exit code 2.
pub fn run_from_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = write!(err, "{e}");
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_exit_codes() {
        let stats = RunStats::default();
        assert_eq!(exit_code_for(&Error::RestartBudgetExhausted { stats }), EXIT_BUDGET);
        assert_eq!(exit_code_for(&Error::TrialBudgetExhausted { budget: 5, stats }), EXIT_BUDGET);
        assert_eq!(exit_code_for(&Error::EmptyLocus { level: 2 }), EXIT_EMPTY_LOCUS);
        assert_eq!(exit_code_for(&Error::NotPrime(4)), EXIT_INVALID);
    }

    #[test]
    fn csv_layout() {
        let report = ExperimentReport {
            parameters: ExperimentParams {
                p: 7,
                dim: 2,
                n: 10,
                r: 0.5,
                precision: None,
                rep: 3,
                cases: 1,
                seed: 0,
                max_restarts: None,
                noise_bound: 0.05,
                max_draws: None,
                gate: GateScale::Codimension,
            },
            rows: vec![ReportRow {
                case: 0,
                c0: 1,
                c1: 4,
                success: true,
                elapsed_ms: 12,
            }],
        };
        let text = report.to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with(r#"# {"p":7,"D":2,"N":10,"r":0.5,"rep":3"#));
        assert_eq!(&lines[1..], ["case,c0,c1,success,elapsed_ms", "0,1,4,true,12"]);
        assert_eq!(ExperimentReport::from_csv(&text).unwrap(), report);
    }
}
