//! The `kraw` command line: parameter sets, evaluation, tables and the
//! verification suite, all speaking JSON.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 usage or input
//! error, 3 invalid parameter set.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use kraw_core::bispec::{operator_m, operator_mtilde, operator_universal, BispecError};
use kraw_core::format::{self, FormatError};
use kraw_core::hyperg::{self, DegreePoint, HypergError, PolynomialTable};
use kraw_core::kappa::{family_ds, family_hoare_rahman, family_milch, griffiths_from_p, KappaError};
use kraw_core::liemod::{self, LieError};
use kraw_core::numeric::{ParseScalarError, DEFAULT_EPS};
use kraw_core::{suite, Approx, Exact, ParameterSet, Scalar};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_KAPPA: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Kappa(#[from] KappaError),
    #[error(transparent)]
    Scalar(#[from] ParseScalarError),
    #[error(transparent)]
    Hyperg(#[from] HypergError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Bispec(#[from] BispecError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Kappa(_) | CliError::Format(FormatError::Kappa(_)) => EXIT_INVALID_KAPPA,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Approx,
}

#[derive(Debug, Parser)]
#[command(name = "kraw", version, about = "Multivariate Krawtchouk polynomials: evaluation and verification")]
pub struct Cli {
    /// Scalar field: exact rationals or complex doubles.
    #[arg(long, value_enum, default_value = "exact", global = true)]
    pub mode: Mode,
    /// Tolerance for approximate mode.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Worker threads for table and check parallelism.
    #[arg(long, env = "KRAW_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Write the JSON result here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct KappaArg {
    /// Parameter-set JSON file, or the JSON text itself.
    #[arg(long)]
    pub kappa: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Ds,
    Milch,
    HoareRahman,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Hypergeometric,
    Generating,
    Pairing,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    /// L_i, acting on mt.
    L,
    /// M_i, acting on m.
    M,
    Universal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a parameter set; lists every violated condition.
    ParamsValidate(KappaArg),
    /// Build a parameter set from `p` alone by Gram-Schmidt.
    ParamsGriffiths {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        p: Vec<String>,
    },
    /// Build a member of one of the explicit families.
    ParamsFamily {
        #[arg(long, value_enum)]
        family: Family,
        /// Ratio for `ds`.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Dimension for `ds`.
        #[arg(long)]
        d: Option<usize>,
        /// Weights for `milch` (d+1 values) or the four numbers for `hoare-rahman`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p: Vec<String>,
    },
    /// Apply the bispectral involution.
    ParamsInvolute(KappaArg),
    /// Evaluate one value P(m, mt).
    Eval {
        #[command(flatten)]
        kappa: KappaArg,
        #[arg(long = "N")]
        n: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        mt: Vec<u32>,
        #[arg(long, value_enum, default_value = "hypergeometric")]
        method: Method,
    },
    /// Full table of P over the lattice, rows m and columns mt.
    Table {
        #[command(flatten)]
        kappa: KappaArg,
        #[arg(long = "N")]
        n: u32,
    },
    /// Run verification suites and report.
    Check {
        /// Parameter set; optional when --table is given.
        #[arg(long)]
        kappa: Option<String>,
        /// Previously written table, used instead of recomputing P.
        #[arg(long)]
        table: Option<String>,
        #[arg(long = "N")]
        n: Option<u32>,
        /// Comma list of suites; all of them by default.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
    },
    /// Dump a difference operator's stencil.
    Stencil {
        #[command(flatten)]
        kappa: KappaArg,
        #[arg(long = "N")]
        n: u32,
        #[arg(long, value_enum, default_value = "l")]
        operator: Operator,
        #[arg(long, default_value_t = 1)]
        i: usize,
    },
}

struct Outcome {
    value: Value,
    code: i32,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Self { value, code: EXIT_OK }
    }
}

fn read_source(arg: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|source| CliError::Io { path: arg.to_string(), source })
}

fn load_kappa<S: Scalar>(arg: &str, eps: f64) -> Result<ParameterSet<S>, CliError> {
    Ok(format::parse_params(&read_source(arg)?, eps)?)
}

fn scalars<S: Scalar>(items: &[String]) -> Result<Vec<S>, CliError> {
    Ok(items.iter().map(|s| S::parse_scalar(s.trim())).collect::<Result<_, _>>()?)
}

fn params_value<S: Scalar>(kappa: &ParameterSet<S>) -> Value {
    format::params_to_value(kappa)
}

fn family<S: Scalar>(family: Family, q: Option<&str>, d: Option<usize>, p: &[String]) -> Result<ParameterSet<S>, CliError> {
    match family {
        Family::Ds => {
            let q = q.ok_or_else(|| CliError::Usage("ds needs --q".into()))?;
            let d = d.ok_or_else(|| CliError::Usage("ds needs --d".into()))?;
            Ok(family_ds(S::parse_scalar(q)?, d)?)
        }
        Family::Milch => {
            if p.len() < 2 {
                return Err(CliError::Usage("milch needs --p with d+1 >= 2 values".into()));
            }
            Ok(family_milch(&scalars::<S>(p)?)?)
        }
        Family::HoareRahman => {
            let v: [S; 4] = scalars::<S>(p)?
                .try_into()
                .map_err(|_| CliError::Usage("hoare-rahman needs exactly four --p values".into()))?;
            Ok(family_hoare_rahman(v)?)
        }
    }
}

fn degree_point(m: &[u32], n: u32) -> Result<DegreePoint, CliError> {
    Ok(DegreePoint::new(m.to_vec(), n)?)
}

fn eval<S: Scalar>(kappa: &ParameterSet<S>, n: u32, m: &[u32], mt: &[u32], method: Method) -> Result<Value, CliError> {
    let dm = degree_point(m, n)?;
    let dmt = degree_point(mt, n)?;
    let hyp = || hyperg::eval_hypergeometric(kappa, &dm, &dmt);
    let gen = || hyperg::eval_generating(kappa, &dm, &dmt);
    let pair = || liemod::pairing_eval(kappa, &dm.to_index(), &dmt.to_index());
    let mut out = json!({ "N": n, "m": m, "mt": mt });
    match method {
        Method::Hypergeometric => out["value"] = json!(hyp()?.to_canonical()),
        Method::Generating => out["value"] = json!(gen()?.to_canonical()),
        Method::Pairing => out["value"] = json!(pair()?.to_canonical()),
        Method::All => {
            let (h, g, p) = (hyp()?, gen()?, pair()?);
            out["value"] = json!(h.to_canonical());
            out["hypergeometric"] = json!(h.to_canonical());
            out["generating"] = json!(g.to_canonical());
            out["pairing"] = json!(p.to_canonical());
        }
    }
    Ok(out)
}

fn check<S: Scalar>(
    kappa: Option<&str>,
    table: Option<&str>,
    n: Option<u32>,
    suite: &[String],
    eps: f64,
) -> Result<Outcome, CliError> {
    let names: Vec<String> = if suite.is_empty() {
        suite::SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        suite.iter().map(|s| s.trim().to_string()).collect()
    };
    if let Some(bad) = names.iter().find(|s| !suite::SUITES.contains(&s.as_str())) {
        return Err(CliError::Usage(format!("unknown suite {bad:?}; expected one of {}", suite::SUITES.join(","))));
    }
    let table: PolynomialTable<S> = match (table, kappa) {
        (Some(t), _) => {
            let t = format::parse_table::<S>(&read_source(t)?, eps)?;
            if let Some(n) = n {
                if n != t.degree() {
                    return Err(CliError::Usage(format!("--N {n} disagrees with table N = {}", t.degree())));
                }
            }
            t
        }
        (None, Some(k)) => {
            let n = n.ok_or_else(|| CliError::Usage("check needs --N with --kappa".into()))?;
            hyperg::table(&load_kappa::<S>(k, eps)?, n)
        }
        (None, None) => return Err(CliError::Usage("check needs --kappa or --table".into())),
    };

    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let (all, parts) = suite::run_all(&names, &table, eps).map_err(CliError::Usage)?;
    let reports = parts.iter().map(|r| serde_json::to_value(r).expect("plain data")).collect();
    let mut value = format::report_to_value(&all, table.kappa());
    value["reports"] = Value::Array(reports);
    let code = if all.pass { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome { value, code })
}

fn execute<S: Scalar>(cmd: &Command, eps: f64) -> Result<Outcome, CliError> {
    match cmd {
        Command::ParamsValidate(k) => {
            let raw = format::parse_raw_params::<S>(&read_source(&k.kappa)?)?;
            let violations = raw.violations(eps);
            if violations.is_empty() {
                let kappa = raw.validate_with(eps)?;
                Ok(Outcome::ok(json!({ "valid": true, "kappa": params_value(&kappa) })))
            } else {
                let list: Vec<Value> = violations
                    .iter()
                    .map(|v| json!({ "condition": v.condition(), "detail": v.to_string() }))
                    .collect();
                Ok(Outcome { value: json!({ "valid": false, "violations": list }), code: EXIT_INVALID_KAPPA })
            }
        }
        Command::ParamsGriffiths { p } => Ok(Outcome::ok(params_value(&griffiths_from_p(&scalars::<S>(p)?)?))),
        Command::ParamsFamily { family: f, q, d, p } => {
            Ok(Outcome::ok(params_value(&family::<S>(*f, q.as_deref(), *d, p)?)))
        }
        Command::ParamsInvolute(k) => Ok(Outcome::ok(params_value(&load_kappa::<S>(&k.kappa, eps)?.involute()))),
        Command::Eval { kappa, n, m, mt, method } => {
            Ok(Outcome::ok(eval(&load_kappa::<S>(&kappa.kappa, eps)?, *n, m, mt, *method)?))
        }
        Command::Table { kappa, n } => {
            let t = hyperg::table(&load_kappa::<S>(&kappa.kappa, eps)?, *n);
            Ok(Outcome::ok(serde_json::to_value(format::table_doc(&t)).expect("plain data")))
        }
        Command::Check { kappa, table, n, suite } => check::<S>(kappa.as_deref(), table.as_deref(), *n, suite, eps),
        Command::Stencil { kappa, n, operator, i } => {
            let k = load_kappa::<S>(&kappa.kappa, eps)?;
            let op = match operator {
                Operator::L => operator_mtilde(&k, *n, *i)?,
                Operator::M => operator_m(&k, *n, *i)?,
                Operator::Universal => operator_universal(&k, *n),
            };
            Ok(Outcome::ok(format::stencil_to_value(&op)))
        }
    }
}

/// Runs the command line, writing JSON to `out` and diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let eps = cli.eps.unwrap_or(DEFAULT_EPS);
    let result = match cli.mode {
        Mode::Exact => execute::<Exact>(&cli.command, eps),
        Mode::Approx => execute::<Approx>(&cli.command, eps),
    };
    match result {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.value).expect("plain data") + "\n";
            let written = match &cli.output {
                Some(path) => fs::write(path, &text),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return EXIT_USAGE;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
