//! JSON formats for set functions, market configurations, price
//! assessments, certificates and approximation reports.
//!
//! Numbers are strings in exact form (`"21/105"`, `"-3"`, `"0.25"`); plain
//! JSON numbers are accepted on input. Subsets are keyed by their sorted,
//! comma-separated state list (`"1,3"`).

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::approx::{ApproxKind, ApproxResult, Distance, DistanceValue};
use crate::arbitrage::{verify_certificate, Certificate, Portfolio, PriceAssessment, Verdict};
use crate::error::Error;
use crate::market::MarketModel;
use crate::scalar::Scalar;
use crate::setfunc::{RandomVariable, SetFunction, StateSpace};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct FormatError(pub String);

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError(format!("malformed JSON: {e}"))
    }
}

/// Reading an input can fail on syntax or on the domain checks of the
/// constructed object.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Domain(#[from] Error),
}

type ReadResult<T> = std::result::Result<T, ReadError>;

fn bad(msg: impl Into<String>) -> ReadError {
    ReadError::Format(FormatError(msg.into()))
}

fn field<'a>(v: &'a Value, name: &str) -> ReadResult<&'a Value> {
    v.get(name).ok_or_else(|| bad(format!("missing field \"{name}\"")))
}

pub fn parse_scalar_value<T: Scalar>(v: &Value, what: &str) -> ReadResult<T> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(bad(format!("{what}: expected a number or numeric string"))),
    };
    T::parse_scalar(&text).ok_or_else(|| bad(format!("{what}: cannot parse \"{text}\"")))
}

fn scalar_list<T: Scalar>(v: &Value, what: &str) -> ReadResult<Vec<T>> {
    let items = v.as_array().ok_or_else(|| bad(format!("{what}: expected an array")))?;
    items.iter().enumerate().map(|(k, x)| parse_scalar_value(x, &format!("{what}[{k}]"))).collect()
}

fn state_count(v: &Value) -> ReadResult<StateSpace> {
    let n = field(v, "n")?.as_u64().ok_or_else(|| bad("\"n\" must be a positive integer"))?;
    Ok(StateSpace::new(n as usize)?)
}

pub fn parse_set_function<T: Scalar>(v: &Value) -> ReadResult<SetFunction<T>> {
    let space = state_count(v)?;
    let values = field(v, "values")?.as_object().ok_or_else(|| bad("\"values\" must be an object"))?;
    let mut entries = vec![T::zero(); space.size()];
    for (key, x) in values {
        let a = space.parse_label(key).ok_or_else(|| bad(format!("invalid subset key \"{key}\" for n = {}", space.n())))?;
        entries[a as usize] = parse_scalar_value(x, key)?;
    }
    Ok(SetFunction::new(space, entries)?)
}

fn render_set_function<T>(f: &SetFunction<T>, sparse: bool, render: impl Fn(&T) -> String) -> Value
where
    T: Scalar,
{
    let space = f.space();
    let mut values = Map::new();
    for a in space.display_order() {
        if a == 0 || (sparse && f[a].approx_zero()) {
            continue;
        }
        values.insert(space.label(a), Value::String(render(&f[a])));
    }
    json!({ "n": space.n(), "values": values })
}

/// Every nonempty subset, in display order.
pub fn set_function_to_json<T: Scalar>(f: &SetFunction<T>) -> Value {
    render_set_function(f, false, T::render)
}

/// Nonzero entries only, for masses.
pub fn mass_to_json<T: Scalar>(f: &SetFunction<T>) -> Value {
    render_set_function(f, true, T::render)
}

fn decimal(v: f64) -> String {
    format!("{v}")
}

/// Market config: `{"m": [...], "r": "0", "s0": "20", "p": [...]?}`, with
/// `1+r` the risk-free factor.
pub fn parse_market<T: Scalar>(v: &Value) -> ReadResult<MarketModel<T>> {
    let m = scalar_list(field(v, "m")?, "m")?;
    let r: T = parse_scalar_value(field(v, "r")?, "r")?;
    let s0 = match v.get("s0") {
        Some(x) => parse_scalar_value(x, "s0")?,
        None => T::one(),
    };
    let p = match v.get("p") {
        None | Some(Value::Null) => None,
        Some(x) => Some(scalar_list(x, "p")?),
    };
    Ok(MarketModel::new(m, T::one() + r, s0, p)?)
}

pub fn market_to_json<T: Scalar>(model: &MarketModel<T>) -> Value {
    let mut out = json!({
        "m": model.returns().iter().map(T::render).collect::<Vec<_>>(),
        "r": (model.r_factor().clone() - T::one()).render(),
        "s0": model.s0().render(),
    });
    if let Some(p) = model.real_world() {
        out["p"] = json!(p.iter().map(T::render).collect::<Vec<_>>());
    }
    out
}

/// Reference probability for contamination: either a list of point masses
/// or a set-function object.
pub fn parse_probability<T: Scalar>(v: &Value, space: StateSpace) -> ReadResult<SetFunction<T>> {
    let f = match v {
        Value::Array(_) => SetFunction::from_probability(space, &scalar_list(v, "q0")?)?,
        _ => parse_set_function(v)?,
    };
    if f.space() != space {
        return Err(Error::LengthMismatch { expected: space.n(), actual: f.space().n() }.into());
    }
    Ok(f)
}

/// Assessment: `{"n", "r", "payoffs": [{"name", "values", "lower", "upper"}]}`.
pub fn parse_assessment<T: Scalar>(v: &Value) -> ReadResult<PriceAssessment<T>> {
    let space = state_count(v)?;
    let r: T = parse_scalar_value(field(v, "r")?, "r")?;
    let items = field(v, "payoffs")?.as_array().ok_or_else(|| bad("\"payoffs\" must be an array"))?;
    let (mut names, mut payoffs, mut lower, mut upper) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, item) in items.iter().enumerate() {
        let name = match item.get("name") {
            Some(Value::String(s)) => s.clone(),
            None | Some(Value::Null) => format!("S{}", k + 1),
            Some(_) => return Err(bad(format!("payoffs[{k}].name must be a string"))),
        };
        let values = scalar_list(field(item, "values")?, &format!("{name}.values"))?;
        payoffs.push(RandomVariable::new(space, values)?);
        lower.push(parse_scalar_value(field(item, "lower")?, &format!("{name}.lower"))?);
        upper.push(match item.get("upper") {
            None | Some(Value::Null) => None,
            Some(x) => Some(parse_scalar_value(x, &format!("{name}.upper"))?),
        });
        names.push(name);
    }
    Ok(PriceAssessment::named(space, names, payoffs, lower, upper, T::one() + r)?)
}

pub fn assessment_to_json<T: Scalar>(a: &PriceAssessment<T>) -> Value {
    let payoffs: Vec<Value> = (0..a.len())
        .map(|k| {
            json!({
                "name": a.names()[k],
                "values": a.payoffs()[k].values().iter().map(T::render).collect::<Vec<_>>(),
                "lower": a.lower_prices()[k].render(),
                "upper": a.upper_prices()[k].as_ref().map(T::render),
            })
        })
        .collect();
    json!({
        "n": a.space().n(),
        "r": (a.r_factor().clone() - T::one()).render(),
        "payoffs": payoffs,
    })
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Consistent => "consistent",
        Verdict::DutchBook => "dutch_book",
        Verdict::ArbitrageA => "arbitrage_a",
        Verdict::ArbitrageB => "arbitrage_b",
    }
}

pub fn parse_verdict(s: &str) -> Option<Verdict> {
    [Verdict::Consistent, Verdict::DutchBook, Verdict::ArbitrageA, Verdict::ArbitrageB]
        .into_iter()
        .find(|&v| verdict_name(v) == s)
}

pub fn portfolio_to_json<T: Scalar>(p: &Portfolio<T>) -> Value {
    json!({
        "lambda": p.lambda.iter().map(T::render).collect::<Vec<_>>(),
        "bond": p.bond.render(),
    })
}

pub fn parse_portfolio<T: Scalar>(v: &Value) -> ReadResult<Portfolio<T>> {
    let lambda = scalar_list(field(v, "lambda")?, "lambda")?;
    let bond = match v.get("bond") {
        None | Some(Value::Null) => T::zero(),
        Some(x) => parse_scalar_value(x, "bond")?,
    };
    Ok(Portfolio::with_bond(lambda, bond))
}

/// Serializes a certificate after replaying it against `a`.
pub fn certificate_to_json<T: Scalar>(a: &PriceAssessment<T>, cert: &Certificate<T>) -> Result<Value, Error> {
    let replayed = verify_certificate(a, cert)?;
    Ok(json!({
        "verdict": verdict_name(cert.verdict),
        "payoffs": a.names(),
        "witness_mass": cert.witness_mass.as_ref().map(mass_to_json),
        "witness_portfolio": cert.witness_portfolio.as_ref().map(portfolio_to_json),
        "strictly_positive": cert.strictly_positive,
        "unique": cert.unique,
        "verification": { "replayed": replayed },
    }))
}

pub fn parse_certificate<T: Scalar>(v: &Value) -> ReadResult<Certificate<T>> {
    let name = field(v, "verdict")?.as_str().ok_or_else(|| bad("\"verdict\" must be a string"))?;
    let verdict = parse_verdict(name).ok_or_else(|| bad(format!("unknown verdict \"{name}\"")))?;
    let witness_mass = match v.get("witness_mass") {
        None | Some(Value::Null) => None,
        Some(x) => Some(parse_set_function(x)?),
    };
    let witness_portfolio = match v.get("witness_portfolio") {
        None | Some(Value::Null) => None,
        Some(x) => Some(parse_portfolio(x)?),
    };
    let flag = |k: &str| v.get(k).and_then(Value::as_bool).unwrap_or(false);
    Ok(Certificate {
        verdict,
        witness_mass,
        witness_portfolio,
        strictly_positive: flag("strictly_positive"),
        unique: flag("unique"),
    })
}

pub fn kind_name(k: ApproxKind) -> &'static str {
    match k {
        ApproxKind::Martingale => "martingale",
        ApproxKind::StrongMartingale => "strong",
    }
}

pub fn distance_name(d: Distance) -> &'static str {
    match d {
        Distance::D1 => "d1",
        Distance::D2 => "d2",
    }
}

/// `d1` reports are exact; `d2` reports carry decimals.
pub fn approx_report<T: Scalar>(result: &ApproxResult<T>) -> Value {
    let (value, mass, belief) = match &result.value {
        DistanceValue::Exact(v) => (v.render(), mass_to_json(&result.mass), set_function_to_json(&result.belief)),
        DistanceValue::Approximate(v) => {
            let dec = |x: &T| decimal(x.to_f64_lossy());
            (
                decimal(*v),
                render_set_function(&result.mass, true, dec),
                render_set_function(&result.belief, false, dec),
            )
        }
    };
    let mut out = json!({
        "kind": kind_name(result.kind),
        "distance": distance_name(result.distance),
        "value": value,
        "mass": mass,
        "belief": belief,
        "unique": result.unique,
        "dominance_minimal": result.dominance_minimal,
    });
    if let (Some(kkt), Some(gap)) = (result.kkt_residual, result.frank_wolfe_gap) {
        out["kkt_residual"] = json!(decimal(kkt));
        out["frank_wolfe_gap"] = json!(decimal(gap));
        out["exact_optimum"] = json!(result.exact_optimum);
    }
    out
}

pub fn error_to_json(kind: &str, message: &str) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn set_function_roundtrip() {
        let space = StateSpace::new(3).unwrap();
        let f = SetFunction::from_fn(space, |a| rat(a as i64, 7));
        let v = set_function_to_json(&f);
        assert_eq!(v["values"]["1,3"], "5/7");
        assert_eq!(parse_set_function::<Rational>(&v).unwrap(), f);
    }

    #[test]
    fn omitted_subsets_are_zero() {
        let v = json!({"n": 2, "values": {"2": "1/2", "1,2": 1}});
        let f: SetFunction<Rational> = parse_set_function(&v).unwrap();
        assert_eq!(f.values(), [rat(0, 1), rat(0, 1), rat(1, 2), rat(1, 1)]);
        assert!(parse_set_function::<Rational>(&json!({"n": 2, "values": {"3": "1"}})).is_err());
    }

    #[test]
    fn market_config() {
        let v = json!({"m": ["4", "2", "1/2", "1/4"], "r": "0", "s0": "20"});
        let m: MarketModel<Rational> = parse_market(&v).unwrap();
        assert_eq!(m.r_factor(), &rat(1, 1));
        assert_eq!(market_to_json(&m), json!({"m": ["4/1", "2/1", "1/2", "1/4"], "r": "0/1", "s0": "20/1"}));
        let bad_market = json!({"m": ["1", "2"], "r": "0"});
        assert!(matches!(parse_market::<Rational>(&bad_market), Err(ReadError::Domain(_))));
        assert!(matches!(parse_market::<Rational>(&json!({"m": "x"})), Err(ReadError::Format(_))));
    }

    #[test]
    fn assessment_roundtrip() {
        let v = json!({"n": 2, "r": "1/10", "payoffs": [
            {"name": "X", "values": ["2", "1"], "lower": "1", "upper": "3/2"},
            {"values": [0, 1], "lower": "0.25"}
        ]});
        let a: PriceAssessment<Rational> = parse_assessment(&v).unwrap();
        assert_eq!(a.names(), ["X", "S2"]);
        assert_eq!(a.lower_prices()[1], rat(1, 4));
        let again: PriceAssessment<Rational> = parse_assessment(&assessment_to_json(&a)).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn verdict_names_roundtrip() {
        for v in [Verdict::Consistent, Verdict::DutchBook, Verdict::ArbitrageA, Verdict::ArbitrageB] {
            assert_eq!(parse_verdict(verdict_name(v)), Some(v));
        }
    }
}
