//! Command-line adapter.
//!
//! Every invocation prints one document on stdout:
//!
//! ```json
//! { "command": "...", "params": {...}, "result": ..., "version": "..." }
//! ```
//!
//! Big integers and exact rationals are rendered as decimal strings. Exit
//! codes: 0 success, 2 usage error, 3 domain error, 4 failed verify suite.

use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::enumerate::{
    count_constrained, hermite_coeff, hermite_probability, series_coefficients, Positivity,
};
use crate::error::{Error, Result};
use crate::genfib::GenFibTable;
use crate::montecarlo::{estimate, exact_value, Mode, SimConfig};
use crate::omega::run_elimination;
use crate::prob::{
    binomial, denominator_parts, prob_exists, prob_forall, prob_ngon, prob_none, ProblemSpec,
};
use crate::rational::ExactRational;
use crate::verify::{self, Grid, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "brokenstick",
    version,
    about = "Exact broken-stick polygon probabilities"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact probability for one of the four questions.
    Prob(ProbArgs),
    /// k-step Fibonacci numbers and partial sums.
    Fib {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        upto: i64,
    },
    /// Omega elimination of the inequality system.
    Omega {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trace: bool,
    },
    /// Counts for N = 0..=M by one of three routes.
    Count {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "N-value")]
        n_value: u64,
        #[arg(long, value_enum)]
        oracle: Oracle,
        #[arg(long, value_enum, default_value_t = PositivityArg::Nonneg)]
        positivity: PositivityArg,
    },
    /// Coefficient of the n-gon generating function.
    Hermite {
        #[arg(long)]
        n: usize,
        #[arg(long = "N-value")]
        n_value: usize,
    },
    /// Monte Carlo estimate.
    Simulate {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Ignored for `ngon`.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        chunks: u64,
    },
    /// Run a cross-check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ProbArgs {
    #[arg(value_enum)]
    kind: ModeArg,
    /// Ignored for `ngon`.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: usize,
    /// Also render a decimal with this many fractional digits.
    #[arg(long)]
    decimal: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Pieces beyond k: n runs over k..=k+n_extra.
    #[arg(long)]
    n_extra: Option<usize>,
    #[arg(long)]
    max_total: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    chunks: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    None,
    Exists,
    Forall,
    Ngon,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::None => Mode::None,
            ModeArg::Exists => Mode::Exists,
            ModeArg::Forall => Mode::Forall,
            ModeArg::Ngon => Mode::Ngon,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Oracle {
    Brute,
    Parts,
    Series,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PositivityArg {
    Nonneg,
    Positive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Lemma1,
    Prop2,
    Asymptotic,
    Montecarlo,
    Hermite,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Lemma1 => Suite::Lemma1,
            SuiteArg::Prop2 => Suite::Prop2,
            SuiteArg::Asymptotic => Suite::Asymptotic,
            SuiteArg::Montecarlo => Suite::Montecarlo,
            SuiteArg::Hermite => Suite::Hermite,
        }
    }
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

/// The document printed for one invocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub result: Value,
    pub version: String,
}

impl OutputRecord {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("record is plain JSON")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => render_json(&self.to_value()),
            Format::Csv => render_csv(&self.result),
            Format::Plain => render_plain(&self.result),
        }
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain JSON");
    s.push('\n');
    s
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn render_csv(result: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", result, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, v) in rows {
        let key = if k.is_empty() {
            "result".to_string()
        } else {
            k
        };
        w.write_record([key, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn render_plain(result: &Value) -> String {
    if let Value::String(s) = result {
        return format!("{s}\n");
    }
    let mut rows = Vec::new();
    flatten("", result, &mut rows);
    rows.into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

fn strings(v: &[BigUint]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

struct Record {
    command: &'static str,
    params: BTreeMap<String, Value>,
}

impl Record {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            params: BTreeMap::new(),
        }
    }

    fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    fn finish(self, result: Value) -> OutputRecord {
        OutputRecord {
            command: self.command.to_string(),
            params: self.params,
            result,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Outcome of a run: exit code plus what to write to stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn spec_for(mode: Mode, k: Option<usize>, n: usize) -> Result<ProblemSpec> {
    match (mode, k) {
        (Mode::Ngon, _) => ProblemSpec::new(n, n),
        (_, Some(k)) => ProblemSpec::new(k, n),
        (_, None) => Err(Error::Domain("--k is required for this mode".into())),
    }
}

fn prob_cmd(args: &ProbArgs) -> Result<OutputRecord> {
    let mode: Mode = args.kind.into();
    let spec = spec_for(mode, args.k, args.n)?;
    let value = match mode {
        Mode::None => prob_none(spec)?,
        Mode::Exists => prob_exists(spec)?,
        Mode::Forall => prob_forall(spec)?,
        Mode::Ngon => prob_ngon(args.n)?,
    };
    let mut rec = Record::new("prob")
        .param("kind", value_name(&args.kind))
        .param("n", args.n);
    if mode != Mode::Ngon {
        rec = rec.param("k", spec.k());
    }
    let result = match args.decimal {
        None => Value::String(value.to_string()),
        Some(d) => {
            rec = rec.param("decimal", d);
            json!({ "exact": value.to_string(), "decimal": value.to_decimal(d) })
        }
    };
    Ok(rec.finish(result))
}

fn fib_cmd(k: i64, upto: i64) -> Result<OutputRecord> {
    if k < 2 {
        return Err(Error::Domain(format!(
            "Fibonacci order k must be at least 2, got {k}"
        )));
    }
    if upto < 0 {
        return Err(Error::Domain(format!(
            "--upto must be non-negative, got {upto}"
        )));
    }
    let mut table = GenFibTable::new(k as usize)?;
    table.extend_to(upto as usize);
    let result = json!({
        "fib": strings(&table.values()[..=upto as usize]),
        "partial_sums": strings(&table.partial_sums()[..=upto as usize]),
    });
    Ok(Record::new("fib")
        .param("k", k)
        .param("upto", upto)
        .finish(result))
}

fn omega_cmd(k: usize, n: usize, trace: bool) -> Result<OutputRecord> {
    let spec = ProblemSpec::new(k, n)?;
    let out = run_elimination(spec, trace)?;
    let mut result = Map::new();
    result.insert("exponents".into(), strings(out.product.exponents()));
    result.insert("sorted".into(), strings(&out.product.sorted()));
    if let Some(steps) = out.trace {
        result.insert(
            "trace".into(),
            serde_json::to_value(steps).expect("trace serializes"),
        );
    }
    Ok(Record::new("omega")
        .param("k", k)
        .param("n", n)
        .param("trace", trace)
        .finish(Value::Object(result)))
}

fn count_cmd(
    k: usize,
    n: usize,
    max_total: u64,
    oracle: Oracle,
    positivity: PositivityArg,
) -> Result<OutputRecord> {
    let spec = ProblemSpec::new(k, n)?;
    let pos = match positivity {
        PositivityArg::Nonneg => Positivity::Nonneg,
        PositivityArg::Positive => Positivity::Positive,
    };
    if !matches!(oracle, Oracle::Brute) && pos == Positivity::Positive {
        return Err(Error::Domain(
            "the parts and series oracles count non-negative solutions only".into(),
        ));
    }
    let m = usize::try_from(max_total).map_err(|_| Error::Domain("--N-value too large".into()))?;
    let counts: Vec<BigUint> = match oracle {
        Oracle::Brute => (0..=max_total)
            .map(|t| count_constrained(spec, t, pos))
            .collect::<Result<_>>()?,
        Oracle::Parts => {
            let parts: Vec<u64> = denominator_parts(spec)?
                .iter()
                .filter_map(num_traits::ToPrimitive::to_u64)
                .collect();
            crate::enumerate::restricted_table(&parts, m)?
                .counts()
                .to_vec()
        }
        Oracle::Series => {
            let cp = run_elimination(spec, false)?.product;
            series_coefficients(&cp, m).counts().to_vec()
        }
    };
    Ok(Record::new("count")
        .param("k", k)
        .param("n", n)
        .param("N-value", max_total)
        .param("oracle", value_name(&oracle))
        .param("positivity", value_name(&positivity))
        .finish(strings(&counts)))
}

fn hermite_cmd(n: usize, total: usize) -> Result<OutputRecord> {
    let coeff = hermite_coeff(n, total)?;
    let compositions = if total >= 1 {
        binomial(total as u64 - 1, n as u64 - 1)
    } else {
        BigUint::ZERO
    };
    let mut result = Map::new();
    result.insert("coefficient".into(), Value::String(coeff.to_string()));
    result.insert(
        "compositions".into(),
        Value::String(compositions.to_string()),
    );
    if total >= n {
        let p: ExactRational = hermite_probability(n, total)?;
        result.insert("probability".into(), Value::String(p.to_string()));
    }
    Ok(Record::new("hermite")
        .param("n", n)
        .param("N-value", total)
        .finish(Value::Object(result)))
}

fn simulate_cmd(
    mode: ModeArg,
    k: Option<usize>,
    n: usize,
    trials: u64,
    seed: u64,
    chunks: u64,
) -> Result<OutputRecord> {
    let m: Mode = mode.into();
    let spec = spec_for(m, k, n)?;
    let config = SimConfig::new(spec, m, trials, seed, chunks)?;
    let result = estimate(&config);
    let exact = exact_value(m, config.spec)?;
    let mut value = serde_json::to_value(&result).expect("sim result serializes");
    if let Value::Object(obj) = &mut value {
        obj.insert("exact".into(), Value::String(exact.to_string()));
        obj.insert("z".into(), json!(result.z_score(&exact)));
        // u64 seeds above 2^53 must survive JSON consumers that read numbers as doubles
        obj.insert("seed".into(), Value::String(seed.to_string()));
    }
    Ok(Record::new("simulate")
        .param("mode", value_name(&mode))
        .param("k", config.spec.k())
        .param("n", n)
        .param("trials", trials)
        .param("seed", seed.to_string())
        .param("chunks", chunks)
        .finish(value))
}

fn verify_cmd(args: &VerifyArgs) -> Result<(OutputRecord, bool)> {
    let grid = Grid {
        k_min: args.k_min,
        k_max: args.k_max,
        n_extra: args.n_extra,
        max_total: args.max_total,
        trials: args.trials,
        seed: args.seed,
        chunks: args.chunks,
    };
    let report = verify::run(args.suite.into(), &grid)?;
    let mut rec = Record::new("verify").param("suite", value_name(&args.suite));
    for (key, v) in [
        ("k-min", args.k_min.map(|x| x as u64)),
        ("k-max", args.k_max.map(|x| x as u64)),
        ("n-extra", args.n_extra.map(|x| x as u64)),
        ("max-total", args.max_total.map(|x| x as u64)),
        ("trials", args.trials),
        ("chunks", args.chunks),
    ] {
        if let Some(v) = v {
            rec = rec.param(key, v);
        }
    }
    if let Some(seed) = args.seed {
        rec = rec.param("seed", seed.to_string());
    }
    let passed = report.passed;
    let value = serde_json::to_value(report).expect("report serializes");
    Ok((rec.finish(value), passed))
}

fn dispatch(cli: &Cli) -> Result<(OutputRecord, bool)> {
    let ok = |r: OutputRecord| (r, true);
    match &cli.command {
        Command::Prob(args) => prob_cmd(args).map(ok),
        Command::Fib { k, upto } => fib_cmd(*k, *upto).map(ok),
        Command::Omega { k, n, trace } => omega_cmd(*k, *n, *trace).map(ok),
        Command::Count {
            k,
            n,
            n_value,
            oracle,
            positivity,
        } => count_cmd(*k, *n, *n_value, *oracle, *positivity).map(ok),
        Command::Hermite { n, n_value } => hermite_cmd(*n, *n_value).map(ok),
        Command::Simulate {
            mode,
            k,
            n,
            trials,
            seed,
            chunks,
        } => simulate_cmd(*mode, *k, *n, *trials, *seed, *chunks).map(ok),
        Command::Verify(args) => verify_cmd(args),
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let first = text.lines().next().unwrap_or("usage error").to_string();
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: format!("{first}\n"),
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok((record, passed)) => Outcome {
            code: if passed { EXIT_OK } else { EXIT_VERIFY_FAILED },
            stdout: record.render(cli.format),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_DOMAIN,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
