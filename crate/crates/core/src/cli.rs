//! `lagsum` command-line frontend.
//!
//! Everything goes through [`run`], which takes the argument list, the
//! `LK_NMAX` value and the output streams explicitly so it can be driven
//! from tests.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::hyper::eval_pfq;
use crate::identities::{
    evaluate, kummer, kummer_series_params, CaseKind, IdentityCase, KummerSign, Method,
};
use crate::series::TruncationPolicy;
use crate::specfun::{nonpositive_integer, POLE_TOL};
use crate::verify::{run_grid, summarize, GridSpec, Status, VerifyRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_SINGULAR: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

/// Environment variable overriding the default term budget.
pub const NMAX_ENV: &str = "LK_NMAX";

pub const CSV_HEADER: [&str; 12] = [
    "case",
    "nu",
    "j",
    "x",
    "lhs",
    "rhs",
    "abs_err",
    "rel_err",
    "status",
    "skip_reason",
    "terms_lhs",
    "terms_rhs",
];

#[derive(Debug, Parser)]
#[command(name = "lagsum", version, about = "Laguerre series closed forms and their verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate S(±ν, ±j) at one point
    Eval(EvalArgs),
    /// Compare a closed form against the defining series over a grid
    Verify(VerifyArgs),
    /// Evaluate a Kummer-type 2F1(−1) formula
    Kummer(KummerArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    /// Relative truncation tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Term budget per series (default 10000, or LK_NMAX)
    #[arg(long)]
    pub nmax: Option<usize>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    /// pp, pm, mp or mm
    #[arg(long)]
    pub case: CaseKind,
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub j: u32,
    #[arg(long)]
    pub x: f64,
    /// closed, direct or middle
    #[arg(long, default_value = "closed")]
    pub method: Method,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub nu_list: Vec<f64>,
    #[arg(long)]
    pub j_max: u32,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub x_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "pp,pm,mp,mm")]
    pub cases: Vec<CaseKind>,
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the table here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Right-hand side: closed or middle
    #[arg(long, default_value = "closed")]
    pub method: Method,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct KummerArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub j: u32,
    #[arg(long, value_enum)]
    pub sign: SignArg,
    /// Also sum the terminating series (a must be a nonpositive integer)
    #[arg(long)]
    pub oracle: bool,
}

/// One output value.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    Null,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(v) if v.is_finite() => format_num(*v),
            Field::Num(_) | Field::Null => String::new(),
            Field::Int(v) => v.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Str(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Field::Num(v) if v.is_finite() => format_num(*v),
            Field::Num(_) | Field::Null => "null".into(),
            Field::Int(v) => v.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Str(s) => serde_json::Value::from(s.as_str()).to_string(),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Flat, ordered key-value view of a record or evaluation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputRow(pub Vec<(&'static str, Field)>);

impl OutputRow {
    fn push(&mut self, key: &'static str, value: Field) {
        self.0.push((key, value));
    }

    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| format!("\"{k}\":{}", v.json()))
            .collect();
        format!("{{{}}}", body.join(","))
    }

    pub fn csv_fields(&self) -> Vec<String> {
        self.0.iter().map(|(_, v)| v.csv()).collect()
    }

    pub fn from_record(r: &VerifyRecord) -> Self {
        let mut row = OutputRow::default();
        row.push("case", Field::Str(r.case.kind().label().into()));
        row.push("nu", Field::Num(r.case.nu));
        row.push("j", Field::Int(r.case.j.into()));
        row.push("x", Field::Num(r.case.x));
        row.push("lhs", Field::Num(r.lhs));
        row.push("rhs", Field::Num(r.rhs));
        row.push("abs_err", Field::Num(r.abs_err));
        row.push("rel_err", Field::Num(r.rel_err));
        row.push("status", Field::Str(r.status.label().into()));
        let detail = r.skip_reason.clone().or_else(|| r.error.clone());
        row.push("skip_reason", detail.map_or(Field::Null, Field::Str));
        row.push("terms_lhs", Field::Int(r.terms_lhs as u64));
        row.push("terms_rhs", Field::Int(r.terms_rhs as u64));
        row
    }
}

fn policy_from(args: &PolicyArgs, env_nmax: Option<&str>) -> Result<TruncationPolicy, String> {
    let mut policy = TruncationPolicy::default();
    if let Some(raw) = env_nmax {
        policy.n_max = raw
            .trim()
            .parse()
            .map_err(|_| format!("{NMAX_ENV} must be a positive integer, got '{raw}'"))?;
    }
    if let Some(n) = args.nmax {
        policy.n_max = n;
    }
    if let Some(tol) = args.tol {
        policy.tol = tol;
    }
    policy.validate().map_err(|e| e.to_string())?;
    Ok(policy)
}

fn exit_for(err: &Error) -> i32 {
    if err.is_singular() {
        EXIT_SINGULAR
    } else {
        EXIT_FAILURE
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, env_nmax: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match cli.command {
        Command::Eval(a) => cmd_eval(&a, env_nmax, out, err),
        Command::Verify(a) => cmd_verify(&a, env_nmax, out, err),
        Command::Kummer(a) => cmd_kummer(&a, out, err),
    }
}

pub fn cmd_eval(args: &EvalArgs, env_nmax: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let policy = match policy_from(&args.policy, env_nmax) {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let case = IdentityCase::new(args.case, args.nu, args.j, args.x);
    let res = match evaluate(&case, args.method, &policy) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_for(&e);
        }
    };
    let mut row = OutputRow::default();
    row.push("case", Field::Str(args.case.label().into()));
    row.push("method", Field::Str(args.method.label().into()));
    row.push("nu", Field::Num(args.nu));
    row.push("j", Field::Int(args.j.into()));
    row.push("x", Field::Num(args.x));
    row.push("value", Field::Num(res.value));
    row.push("abs_err_est", Field::Num(res.abs_err_est));
    row.push("terms_used", Field::Int(res.terms_used as u64));
    row.push("terminated", Field::Bool(res.terminated));
    if writeln!(out, "{}", row.to_json()).is_err() {
        return EXIT_IO;
    }
    EXIT_OK
}

fn render_csv(rows: &[OutputRow]) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_fields())?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn cmd_verify(
    args: &VerifyArgs,
    env_nmax: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let policy = match policy_from(&args.policy, env_nmax) {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let spec = GridSpec {
        nu_values: args.nu_list.clone(),
        j_values: (0..=args.j_max).collect(),
        x_values: args.x_list.clone(),
        cases: args.cases.clone(),
        rel_tol: args.rel_tol,
        policy,
        method: args.method,
    };
    let records = match run_grid(&spec) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let summary = summarize(&records);
    let rows: Vec<OutputRow> = records.iter().map(OutputRow::from_record).collect();

    let bytes = match args.format {
        Format::Csv => match render_csv(&rows) {
            Ok(b) => b,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_IO;
            }
        },
        Format::Json => {
            let body: Vec<String> = rows.iter().map(OutputRow::to_json).collect();
            let summary = serde_json::to_string(&summary).expect("summary serializes");
            format!("{{\"records\":[{}],\"summary\":{summary}}}\n", body.join(",")).into_bytes()
        }
    };
    let written = match &args.out {
        Some(path) => fs::write(path, &bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => out.write_all(&bytes).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "error: cannot write output: {msg}");
        return EXIT_IO;
    }
    if args.format == Format::Csv || args.out.is_some() {
        let _ = writeln!(
            err,
            "{} records: {} pass, {} fail, {} skip, max rel_err {:e}",
            summary.total, summary.passed, summary.failed, summary.skipped, summary.max_rel_err
        );
    }
    if records.iter().any(|r| r.status == Status::Fail) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}

pub fn cmd_kummer(args: &KummerArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let sign = match args.sign {
        SignArg::Plus => KummerSign::Plus,
        SignArg::Minus => KummerSign::Minus,
    };
    let value = match kummer(args.a, args.b, args.j, sign) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_for(&e);
        }
    };
    let mut row = OutputRow::default();
    row.push("a", Field::Num(args.a));
    row.push("b", Field::Num(args.b));
    row.push("j", Field::Int(args.j.into()));
    row.push(
        "sign",
        Field::Str(if sign == KummerSign::Plus { "plus" } else { "minus" }.into()),
    );
    row.push("value", Field::Num(value));
    if args.oracle {
        if nonpositive_integer(args.a, POLE_TOL).is_none() {
            let _ = writeln!(err, "note: --oracle needs a nonpositive integer a, skipped");
        } else {
            let params = kummer_series_params(args.a, args.b, args.j, sign);
            match eval_pfq(&params, &TruncationPolicy::default()) {
                Ok(s) => {
                    row.push("oracle", Field::Num(s.value));
                    row.push("diff", Field::Num(value - s.value));
                }
                Err(e) => {
                    let _ = writeln!(err, "error: oracle: {e}");
                    return EXIT_FAILURE;
                }
            }
        }
    }
    if writeln!(out, "{}", row.to_json()).is_err() {
        return EXIT_IO;
    }
    EXIT_OK
}
