//! Command-line front end. Every command builds a JSON report; `--format
//! table` renders that report as aligned text without recomputing anything.
//!
//! Exit codes: 0 on success, 1 on I/O, parse or usage errors, 2 on domain
//! errors (including a violation under `--expect-consistent` and a failed
//! `verify-paper` check). Errors are reported as JSON on stderr.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::approx::{default_q0, epsilon_contaminate, solve_inner, ApproxKind, ApproxProblem, Distance, DistanceValue};
use crate::arbitrage::{check_dutch_book, check_no_arbitrage, normalize_two_sided, PriceAssessment, Verdict};
use crate::error::Error;
use crate::golden;
use crate::io::{
    approx_report, certificate_to_json, error_to_json, mass_to_json, parse_assessment, parse_market, parse_probability,
    set_function_to_json, FormatError, ReadError,
};
use crate::market::MarketModel;
use crate::scalar::{parse_rational, render_with_denominator, Rational, Scalar};
use crate::setfunc::{RandomVariable, StateSpace, MAX_STATES};

/// Environment variable that lowers the maximum accepted state count.
pub const MAX_N_VAR: &str = "MARTBEL_MAX_N";

#[derive(Debug, Parser)]
#[command(name = "martbel", version, about = "Martingale-measure envelopes, belief-function pricing and no-arbitrage certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Render rationals over this common denominator in tables when exact.
    #[arg(long, global = true)]
    pub denominator: Option<u64>,

    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Martingale,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceArg {
    D1,
    D2,
}

impl From<KindArg> for ApproxKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Martingale => ApproxKind::Martingale,
            KindArg::Strong => ApproxKind::StrongMartingale,
        }
    }
}

impl From<DistanceArg> for Distance {
    fn from(d: DistanceArg) -> Self {
        match d {
            DistanceArg::D1 => Distance::D1,
            DistanceArg::D2 => Distance::D2,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower envelope of the martingale measures of a market config.
    Envelope { input: PathBuf },
    /// Möbius inverse of the lower envelope.
    Mobius { input: PathBuf },
    /// Split of the envelope into two necessity measures.
    Decompose { input: PathBuf },
    /// No-arbitrage price interval of one or more payoffs.
    Interval {
        input: PathBuf,
        /// Comma-separated payoff values, one per state; repeatable.
        #[arg(long, required = true)]
        payoff: Vec<String>,
    },
    /// Generalized Dutch-book check of a price assessment.
    Dutchbook {
        input: PathBuf,
        /// Exit with code 2 unless the assessment is consistent.
        #[arg(long)]
        expect_consistent: bool,
    },
    /// Generalized no-arbitrage check of a price assessment.
    Noarb {
        input: PathBuf,
        #[arg(long)]
        expect_consistent: bool,
    },
    /// Inner approximation of the envelope by a martingale belief function.
    Approx {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Martingale)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = DistanceArg::D1)]
        distance: DistanceArg,
    },
    /// ε-contamination of a reference measure with the inner approximation.
    Contaminate {
        input: PathBuf,
        #[arg(long, default_value = "1/2")]
        eps: String,
        /// Reference probability (JSON list or set function); defaults to
        /// the average of the extreme martingale measures.
        #[arg(long)]
        q0: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = KindArg::Martingale)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = DistanceArg::D1)]
        distance: DistanceArg,
    },
    /// Run the embedded golden checks.
    VerifyPaper,
}

#[derive(Debug)]
pub enum Failure {
    Io(String),
    Format(String),
    Domain(Error),
    /// The command ran and produced a report, but the outcome is a domain
    /// failure (for instance a violation under `--expect-consistent`).
    Rejected { report: Value, kind: &'static str, message: String },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) | Failure::Format(_) => 1,
            Failure::Domain(_) | Failure::Rejected { .. } => 2,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Io(m) => error_to_json("Io", m),
            Failure::Format(m) => error_to_json("Format", m),
            Failure::Domain(e) => error_to_json(e.kind(), &e.to_string()),
            Failure::Rejected { kind, message, .. } => error_to_json(kind, message),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<ReadError> for Failure {
    fn from(e: ReadError) -> Self {
        match e {
            ReadError::Format(FormatError(m)) => Failure::Format(m),
            ReadError::Domain(e) => Failure::Domain(e),
        }
    }
}

/// Parses `MARTBEL_MAX_N`; values above the library cap are clamped.
pub fn state_cap(var: Option<&str>) -> Result<usize, Failure> {
    match var {
        None => Ok(MAX_STATES),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k.min(MAX_STATES)),
            _ => Err(Failure::Format(format!("{MAX_N_VAR} must be a positive integer, got \"{v}\""))),
        },
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn load_market(path: &Path, cap: usize) -> Result<MarketModel<Rational>, Failure> {
    let v = read_json(path)?;
    // Check the size before the model validates anything expensive.
    if let Some(m) = v.get("m").and_then(Value::as_array) {
        if m.len() > cap {
            return Err(Failure::Domain(Error::TooLarge { n: m.len(), max: cap }));
        }
    }
    Ok(parse_market(&v)?)
}

fn load_assessment(path: &Path, cap: usize) -> Result<PriceAssessment<Rational>, Failure> {
    let v = read_json(path)?;
    if let Some(n) = v.get("n").and_then(Value::as_u64) {
        if n as usize > cap {
            return Err(Failure::Domain(Error::TooLarge { n: n as usize, max: cap }));
        }
    }
    let a = parse_assessment(&v)?;
    Ok(if a.is_two_sided() { normalize_two_sided(&a)? } else { a })
}

fn parse_payoff(space: StateSpace, text: &str) -> Result<RandomVariable<Rational>, Failure> {
    let values = text
        .split(',')
        .map(|s| parse_rational(s).ok_or_else(|| Failure::Format(format!("cannot parse payoff entry \"{s}\""))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RandomVariable::new(space, values)?)
}

fn split_json(model: &MarketModel<Rational>) -> Result<Value, Failure> {
    let split = model.split_index()?;
    Ok(json!({ "s": split.s, "boundary": split.boundary }))
}

fn envelope_report(model: &MarketModel<Rational>) -> Result<Value, Failure> {
    let points: Vec<Value> = model
        .extreme_points()?
        .into_iter()
        .map(|p| json!({ "i": p.i, "j": p.j, "weights": p.weights.iter().map(Scalar::render).collect::<Vec<_>>() }))
        .collect();
    let mut out = json!({ "split": split_json(model)?, "extreme_points": points });
    for p in model.extreme_points()? {
        out[format!("Q_{},{}", p.i, p.j)] = set_function_to_json(&p.measure(model.space()));
    }
    out["envelope"] = set_function_to_json(&model.lower_envelope()?);
    Ok(out)
}

fn consistency_report(
    a: &PriceAssessment<Rational>,
    cert: &crate::arbitrage::Certificate<Rational>,
    expect_consistent: bool,
) -> Result<Value, Failure> {
    let report = certificate_to_json(a, cert)?;
    if expect_consistent && cert.verdict != Verdict::Consistent {
        let kind = match cert.verdict {
            Verdict::DutchBook => "DutchBook",
            Verdict::ArbitrageA => "ArbitrageA",
            Verdict::ArbitrageB => "ArbitrageB",
            Verdict::Consistent => unreachable!(),
        };
        let message = format!("assessment is not consistent: {}", report["verdict"].as_str().unwrap_or_default());
        return Err(Failure::Rejected { report, kind, message });
    }
    Ok(report)
}

/// Runs a command and returns its JSON report.
pub fn execute(command: &Command, cap: usize) -> Result<Value, Failure> {
    match command {
        Command::Envelope { input } => {
            envelope_report(&load_market(input, cap)?)
        }
        Command::Mobius { input } => {
            let model = load_market(input, cap)?;
            let mass = model.envelope_moebius()?;
            Ok(json!({ "split": split_json(&model)?, "mass": mass_to_json(&mass) }))
        }
        Command::Decompose { input } => {
            let model = load_market(input, cap)?;
            let d = model.necessity_decomposition()?;
            Ok(json!({
                "alpha": d.alpha.render(),
                "mass_1": mass_to_json(&d.n1.moebius_transform()?),
                "mass_2": mass_to_json(&d.n2.moebius_transform()?),
                "N1": set_function_to_json(&d.n1),
                "N2": set_function_to_json(&d.n2),
                "envelope": set_function_to_json(&d.recombine()),
            }))
        }
        Command::Interval { input, payoff } => {
            let model = load_market(input, cap)?;
            let mut rows = Vec::new();
            for text in payoff {
                let x = parse_payoff(model.space(), text)?;
                let (lo, hi) = model.price_interval(&x)?;
                rows.push(json!({
                    "payoff": x.values().iter().map(Scalar::render).collect::<Vec<_>>(),
                    "lower": lo.render(),
                    "upper": hi.render(),
                }));
            }
            Ok(json!({ "intervals": rows }))
        }
        Command::Dutchbook { input, expect_consistent } => {
            let a = load_assessment(input, cap)?;
            consistency_report(&a, &check_dutch_book(&a)?, *expect_consistent)
        }
        Command::Noarb { input, expect_consistent } => {
            let a = load_assessment(input, cap)?;
            consistency_report(&a, &check_no_arbitrage(&a)?, *expect_consistent)
        }
        Command::Approx { input, kind, distance } => {
            let model = load_market(input, cap)?;
            let problem = ApproxProblem::new(model, (*kind).into(), (*distance).into())?;
            Ok(approx_report(&solve_inner(&problem)?))
        }
        Command::Contaminate { input, eps, q0, kind, distance } => {
            let model = load_market(input, cap)?;
            let eps = parse_rational(eps).ok_or_else(|| Failure::Format(format!("cannot parse eps \"{eps}\"")))?;
            let q0 = match q0 {
                Some(path) => parse_probability(&read_json(path)?, model.space())?,
                None => default_q0(&model)?,
            };
            let problem = ApproxProblem::new(model.clone(), (*kind).into(), (*distance).into())?;
            let result = solve_inner(&problem)?;
            let mixed = epsilon_contaminate(&q0, &result.belief, &eps)?;
            let value = mixed.choquet(&model.return_payoff())?;
            let martingale = match result.value {
                DistanceValue::Exact(_) => &value == model.r_factor(),
                DistanceValue::Approximate(_) => (value.to_f64_lossy() - model.r_factor().to_f64_lossy()).abs() <= 1e-9,
            };
            let mut report = approx_report(&result);
            report["eps"] = json!(eps.render());
            report["q0"] = set_function_to_json(&q0);
            report["contaminated"] = match result.value {
                DistanceValue::Exact(_) => set_function_to_json(&mixed),
                DistanceValue::Approximate(_) => decimal_set_function(&mixed),
            };
            report["choquet_return"] = json!(match result.value {
                DistanceValue::Exact(_) => value.render(),
                DistanceValue::Approximate(_) => format!("{}", value.to_f64_lossy()),
            });
            report["martingale"] = json!(martingale);
            Ok(report)
        }
        Command::VerifyPaper => {
            let checks = golden::run_all();
            let passed = checks.iter().filter(|c| c.passed).count();
            let rows: Vec<Value> = checks
                .iter()
                .map(|c| json!({ "check": c.name, "result": if c.passed { "pass" } else { "FAIL" }, "detail": c.detail }))
                .collect();
            let report = json!({ "checks": rows, "passed": passed, "total": checks.len() });
            if passed != checks.len() {
                let message = format!("{} of {} golden checks failed", checks.len() - passed, checks.len());
                return Err(Failure::Rejected { report, kind: "GoldenFailure", message });
            }
            Ok(report)
        }
    }
}

fn decimal_set_function(f: &crate::setfunc::SetFunction<Rational>) -> Value {
    let mut v = set_function_to_json(f);
    if let Some(values) = v["values"].as_object_mut() {
        for x in values.values_mut() {
            let q = x.as_str().and_then(parse_rational).unwrap_or_default();
            *x = json!(format!("{}", q.to_f64_lossy()));
        }
    }
    v
}

fn is_set_function(v: &Value) -> bool {
    v.get("n").is_some_and(Value::is_u64) && v.get("values").is_some_and(Value::is_object) && v.as_object().is_some_and(|o| o.len() == 2)
}

fn cell(v: &Value, denominator: Option<u64>) -> String {
    match v {
        Value::String(s) => {
            let exact = s.contains('/') || s.trim_start_matches('-').bytes().all(|b| b.is_ascii_digit());
            match parse_rational(s) {
                Some(q) if exact && q.is_integer() => q.to_integer().to_string(),
                Some(q) if exact => render_with_denominator(&q, denominator),
                _ => s.clone(),
            }
        }
        Value::Null => "-".into(),
        Value::Array(items) => items.iter().map(|x| cell(x, denominator)).collect::<Vec<_>>().join(" "),
        Value::Object(_) => serde_json::to_string(v).unwrap_or_default(),
        other => other.to_string(),
    }
}

fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let width = |k: usize| rows.iter().map(|r| r[k].chars().count()).chain([header[k].chars().count()]).max().unwrap_or(0);
    let widths: Vec<usize> = (0..header.len()).map(width).collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}", w = w)).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = String::new();
    out.push_str(&line(header));
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(&rule));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

fn set_function_table(columns: &[(String, &Value)], denominator: Option<u64>) -> String {
    let n = columns[0].1["n"].as_u64().unwrap_or(0) as usize;
    let space = match StateSpace::new(n) {
        Ok(s) => s,
        Err(_) => return String::new(),
    };
    let mut header = vec!["event".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.clone()));
    let rows: Vec<Vec<String>> = space
        .display_order()
        .into_iter()
        .skip(1)
        .map(|a| {
            let label = space.label(a);
            let mut row = vec![space.compact_label(a)];
            for (_, f) in columns {
                let v = f["values"].get(&label).cloned().unwrap_or(json!("0"));
                row.push(cell(&v, denominator));
            }
            row
        })
        .collect();
    aligned(&header, &rows)
}

fn record_table(items: &[Value], denominator: Option<u64>) -> String {
    let mut header: Vec<String> = Vec::new();
    for item in items {
        for k in item.as_object().into_iter().flat_map(Map::keys) {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let rows: Vec<Vec<String>> =
        items.iter().map(|item| header.iter().map(|k| cell(item.get(k).unwrap_or(&Value::Null), denominator)).collect()).collect();
    aligned(&header, &rows)
}

fn flatten<'a>(prefix: &str, v: &'a Value, scalars: &mut Vec<(String, &'a Value)>, sets: &mut Vec<(String, &'a Value)>, records: &mut Vec<(String, &'a [Value])>) {
    match v {
        Value::Object(map) if !is_set_function(v) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, scalars, sets, records);
            }
        }
        Value::Object(_) => sets.push((prefix.to_string(), v)),
        Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_object) => records.push((prefix.to_string(), items)),
        _ => scalars.push((prefix.to_string(), v)),
    }
}

/// Aligned-text rendering of a report: scalar fields first, then record
/// lists, then all set functions side by side over the events.
pub fn render_table(report: &Value, denominator: Option<u64>) -> String {
    let (mut scalars, mut sets, mut records) = (Vec::new(), Vec::new(), Vec::new());
    flatten("", report, &mut scalars, &mut sets, &mut records);
    let mut out = String::new();
    let key_width = scalars.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in &scalars {
        let line = format!("{k:<key_width$}  {}", cell(v, denominator));
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for (k, items) in &records {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("{k}\n"));
        out.push_str(&record_table(items, denominator));
    }
    let mut by_n: Vec<(u64, Vec<(String, &Value)>)> = Vec::new();
    for (k, f) in sets {
        let n = f["n"].as_u64().unwrap_or(0);
        match by_n.iter_mut().find(|(m, _)| *m == n) {
            Some((_, group)) => group.push((k, f)),
            None => by_n.push((n, vec![(k, f)])),
        }
    }
    for (_, group) in &by_n {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&set_function_table(group, denominator));
    }
    out
}

fn emit(cli: &Cli, report: &Value, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        Format::Table => render_table(report, cli.denominator),
    };
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

/// Runs the CLI against explicit streams and returns the exit code.
pub fn run_with(cli: &Cli, max_n: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = state_cap(max_n).and_then(|cap| execute(&cli.command, cap)).and_then(|report| emit(cli, &report, stdout));
    match outcome {
        Ok(()) => 0,
        Err(failure) => {
            if let Failure::Rejected { report, .. } = &failure {
                if let Err(e) = emit(cli, report, stdout) {
                    let _ = writeln!(stderr, "{}", e.to_json());
                    return e.exit_code();
                }
            }
            let _ = writeln!(stderr, "{}", failure.to_json());
            failure.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    let max_n = std::env::var(MAX_N_VAR).ok();
    run_with(cli, max_n.as_deref(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
