//! Embedded reference computations on the standard worked instances, run
//! by `martbel verify-paper`. Every check is exact except the `d2` ones,
//! which allow `1e-4` absolute error on six-digit reference values.

use crate::approx::{default_q0, epsilon_contaminate, solve_inner, solve_strong, ApproxKind, ApproxProblem, Distance, DistanceValue};
use crate::arbitrage::{check_dutch_book, check_no_arbitrage, portfolio_gain, verify_certificate, verify_dutch_book, Portfolio, PriceAssessment, Verdict};
use crate::market::MarketModel;
use crate::scalar::{parse_rational, rat, Rational, Scalar};
use crate::setfunc::{CapacityClass, RandomVariable, SetFunction, StateSpace};

/// Tolerance for the six-significant-digit `d2` references.
pub const D2_REFERENCE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<(), String>;

const CHECKS: &[(&str, Check)] = &[
    ("four-state envelope and mass", four_state_envelope),
    ("necessity decomposition", necessity_decomposition),
    ("choquet gap and marginal vector", choquet_gap),
    ("three-state price intervals", price_intervals),
    ("dutch book on three contracts", dutch_book),
    ("no-arbitrage witness", no_arbitrage_witness),
    ("contamination of the envelope", contamination_failure),
    ("d1 inner approximation", d1_inner),
    ("d1 non-uniqueness", d1_non_unique),
    ("d2 inner approximation", d2_inner),
    ("strong martingale approximation", strong),
];

pub fn run_all() -> Vec<GoldenCheck> {
    CHECKS
        .iter()
        .map(|&(name, check)| match check() {
            Ok(()) => GoldenCheck { name, passed: true, detail: String::new() },
            Err(detail) => GoldenCheck { name, passed: false, detail },
        })
        .collect()
}

fn r(v: i64) -> Rational {
    rat(v, 1)
}

pub fn four_state_market() -> MarketModel<Rational> {
    MarketModel::new(vec![r(4), r(2), rat(1, 2), rat(1, 4)], r(1), r(20), None).expect("viable")
}

pub fn three_state_market() -> MarketModel<Rational> {
    MarketModel::new(vec![r(4), r(2), rat(1, 4)], r(1), r(20), None).expect("viable")
}

pub fn high_rate_market() -> MarketModel<Rational> {
    MarketModel::new(vec![r(5), r(3), r(2), rat(1, 2)], r(4), r(20), None).expect("viable")
}

/// The three contracts `S¹ = (10,10,20,20)`, `S² = (0,10,0,10)`,
/// `S³ = S¹ + 2S²` at zero interest, with the given lower prices.
pub fn three_contracts(prices: [i64; 3]) -> PriceAssessment<Rational> {
    let space = StateSpace::new(4).expect("n = 4");
    let rv = |v: [i64; 4]| RandomVariable::new(space, v.iter().map(|&x| r(x)).collect()).expect("length 4");
    PriceAssessment::new(
        space,
        vec![rv([10, 10, 20, 20]), rv([0, 10, 0, 10]), rv([10, 30, 20, 40])],
        prices.iter().map(|&p| r(p)).collect(),
        r(1),
    )
    .expect("valid assessment")
}

/// A set function from a whitespace-separated row in display order
/// (`∅, 1, 2, …, Ω`).
pub fn row(space: StateSpace, values: &str) -> SetFunction<Rational> {
    let order = space.display_order();
    let parsed: Vec<Rational> = values.split_whitespace().map(|v| parse_rational(v).expect("numeric")).collect();
    assert_eq!(parsed.len(), order.len(), "row length");
    SetFunction::from_entries(space, order.into_iter().zip(parsed))
}

/// Sparse set function from `(label, value)` pairs with compact labels.
pub fn entries(space: StateSpace, items: &[(&str, &str)]) -> SetFunction<Rational> {
    SetFunction::from_entries(
        space,
        items.iter().map(|&(label, v)| {
            let mask = label.chars().fold(0, |m, c| m | 1 << (c.to_digit(10).expect("digit") - 1));
            (mask, parse_rational(v).expect("numeric"))
        }),
    )
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn same(label: &str, got: &SetFunction<Rational>, want: &SetFunction<Rational>) -> Result<(), String> {
    let space = got.space();
    for a in space.display_order() {
        ensure(got[a] == want[a], || {
            format!("{label}({}) = {}, expected {}", space.compact_label(a), got[a].render(), want[a].render())
        })?;
    }
    Ok(())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

const FOUR_STATE_ENVELOPE: &str =
    "0 0 0 0 0 15/105 0 0 0 0 60/105 21/105 15/105 60/105 84/105 1";
const FOUR_STATE_MASS: &str = "0 0 0 0 0 15/105 0 0 0 0 60/105 6/105 0 0 24/105 0";

fn four_state_envelope() -> Result<(), String> {
    let m = four_state_market();
    let space = m.space();
    same("Q", &m.lower_envelope().map_err(err)?, &row(space, FOUR_STATE_ENVELOPE))?;
    same("mu", &m.envelope_moebius().map_err(err)?, &row(space, FOUR_STATE_MASS))?;
    let class = m.lower_envelope().map_err(err)?.classify().map_err(err)?;
    ensure(class == CapacityClass::Belief, || format!("envelope classified as {class:?}"))
}

fn necessity_decomposition() -> Result<(), String> {
    let m = four_state_market();
    let space = m.space();
    let d = m.necessity_decomposition().map_err(err)?;
    ensure(d.alpha == rat(21, 105), || format!("alpha = {}", d.alpha.render()))?;
    same("N1", &d.n1, &row(space, "0 0 0 0 0 15/21 0 0 0 0 0 1 15/21 0 0 1"))?;
    same("N2", &d.n2, &row(space, "0 0 0 0 0 0 0 0 0 0 60/84 0 0 60/84 1 1"))?;
    for (label, n) in [("N1", &d.n1), ("N2", &d.n2)] {
        let class = n.classify().map_err(err)?;
        ensure(class == CapacityClass::Necessity, || format!("{label} classified as {class:?}"))?;
    }
    same("recombined", &d.recombine(), &row(space, FOUR_STATE_ENVELOPE))
}

fn choquet_gap() -> Result<(), String> {
    let m = four_state_market();
    let q = m.lower_envelope().map_err(err)?;
    let value = q.choquet(&m.return_payoff()).map_err(err)?;
    ensure(value == rat(54, 105), || format!("Choquet value {}", value.render()))?;
    let q_sigma = q.marginal_vector(&[0, 1, 2, 3]);
    let want = [r(0), rat(15, 105), rat(6, 105), rat(84, 105)];
    ensure(q_sigma == want, || format!("marginal vector {q_sigma:?}"))?;
    let mean = q_sigma.iter().zip(m.returns()).fold(r(0), |acc, (p, x)| acc + p * x);
    ensure(&mean != m.r_factor(), || "marginal vector is a martingale measure".into())
}

fn price_intervals() -> Result<(), String> {
    let m = three_state_market();
    let space = m.space();
    same("Q", &m.lower_envelope().map_err(err)?, &row(space, "0 0 0 60/105 21/105 60/105 84/105 1"))?;
    same("mu", &m.envelope_moebius().map_err(err)?, &row(space, "0 0 0 60/105 21/105 0 24/105 0"))?;
    let rv = |v: [i64; 3]| RandomVariable::new(space, v.iter().map(|&x| r(x)).collect()).expect("length 3");
    let x = m.price_interval(&rv([20, 10, 10])).map_err(err)?;
    ensure(x == (r(10), r(12)), || format!("interval of X: ({}, {})", x.0.render(), x.1.render()))?;
    let y = m.price_interval(&rv([10, 10, 20])).map_err(err)?;
    ensure(y == (rat(110, 7), r(18)), || format!("interval of Y: ({}, {})", y.0.render(), y.1.render()))
}

fn dutch_book() -> Result<(), String> {
    let a = three_contracts([15, 5, 20]);
    let cert = check_dutch_book(&a).map_err(err)?;
    ensure(cert.verdict == Verdict::DutchBook, || format!("verdict {:?}", cert.verdict))?;
    ensure(verify_certificate(&a, &cert).map_err(err)?, || "certificate does not replay".into())?;
    let arb = check_no_arbitrage(&a).map_err(err)?;
    ensure(arb.verdict != Verdict::Consistent, || "no-arbitrage check reports consistent".into())?;

    let lambda = Portfolio::new(vec![r(-1), r(-2), r(1)]);
    let gain = portfolio_gain(&a, &lambda).map_err(err)?;
    ensure(gain.price == r(-5), || format!("portfolio price {}", gain.price.render()))?;
    ensure(gain.gain.min() == r(5), || format!("minimum gain {}", gain.gain.min().render()))?;
    ensure(verify_dutch_book(&a, &lambda).map_err(err)?, || "reference portfolio rejected".into())
}

/// Reference witness for the prices `(15, 5, 26)`.
pub fn witness_mass() -> SetFunction<Rational> {
    let space = StateSpace::new(4).expect("n = 4");
    entries(space, &[("1", "2/10"), ("2", "1/10"), ("3", "1/10"), ("4", "4/10"), ("12", "1/10"), ("23", "1/10")])
}

fn no_arbitrage_witness() -> Result<(), String> {
    let a = three_contracts([15, 5, 26]);
    let cert = check_no_arbitrage(&a).map_err(err)?;
    ensure(cert.verdict == Verdict::Consistent, || format!("verdict {:?}", cert.verdict))?;
    ensure(cert.strictly_positive, || "witness is not positive on singletons".into())?;
    ensure(verify_certificate(&a, &cert).map_err(err)?, || "certificate does not replay".into())?;
    let bel = witness_mass().zeta_transform().map_err(err)?;
    for (k, x) in a.payoffs().iter().enumerate() {
        let price = bel.choquet(x).map_err(err)?;
        ensure(price == a.lower_prices()[k], || format!("reference witness prices payoff {} at {}", k + 1, price.render()))?;
    }
    Ok(())
}

fn contamination_failure() -> Result<(), String> {
    let m = four_state_market();
    let q0 = default_q0(&m).map_err(err)?;
    let q = m.lower_envelope().map_err(err)?;
    for eps in [rat(1, 4), rat(1, 2), rat(3, 4)] {
        let mixed = epsilon_contaminate(&q0, &q, &eps).map_err(err)?;
        let value = mixed.choquet(&m.return_payoff()).map_err(err)?;
        let want = (r(1) - eps.clone()) * m.r_factor() + eps.clone() * rat(54, 105);
        ensure(value == want, || format!("eps = {}: value {}", eps.render(), value.render()))?;
        ensure(&value < m.r_factor(), || format!("eps = {}: martingale equality holds", eps.render()))?;
    }
    Ok(())
}

fn d1_inner() -> Result<(), String> {
    let m = four_state_market();
    let space = m.space();
    let p = ApproxProblem::new(m.clone(), ApproxKind::Martingale, Distance::D1).map_err(err)?;
    let res = solve_inner(&p).map_err(err)?;
    ensure(res.value == DistanceValue::Exact(rat(96, 105)), || format!("d1 value {:?}", res.value))?;
    let reference = entries(space, &[("1", "21/105"), ("34", "60/105"), ("234", "24/105")]);
    ensure(p.is_feasible(&reference), || "reference mass infeasible".into())?;
    let bel = reference.zeta_transform().map_err(err)?;
    same("Bel", &bel, &row(space, "0 21/105 0 0 0 21/105 21/105 21/105 0 0 60/105 21/105 21/105 81/105 84/105 1"))?;

    let q0 = default_q0(&m).map_err(err)?;
    same("Q0", &q0, &row(space, "0 36/420 80/420 160/420 144/420 116/420 196/420 180/420 240/420 224/420 304/420 276/420 260/420 340/420 384/420 1"))?;
    let mixed = epsilon_contaminate(&q0, &bel, &rat(1, 2)).map_err(err)?;
    same("Bel_eps", &mixed, &row(space, "0 60/420 40/420 80/420 72/420 100/420 140/420 132/420 120/420 112/420 272/420 180/420 172/420 332/420 360/420 1"))?;
    let value = mixed.choquet(&m.return_payoff()).map_err(err)?;
    ensure(&value == m.r_factor(), || format!("contaminated Choquet value {}", value.render()))
}

fn d1_non_unique() -> Result<(), String> {
    let m = high_rate_market();
    let space = m.space();
    same("Q", &m.lower_envelope().map_err(err)?, &row(space, "0 9/18 0 0 0 12/18 9/18 9/18 0 0 0 14/18 12/18 9/18 4/18 1"))?;
    same("mu", &m.envelope_moebius().map_err(err)?, &row(space, "0 9/18 0 0 0 3/18 0 0 0 0 0 2/18 0 0 4/18 0"))?;
    let p = ApproxProblem::new(m, ApproxKind::Martingale, Distance::D1).map_err(err)?;
    let res = solve_inner(&p).map_err(err)?;
    ensure(res.value == DistanceValue::Exact(rat(20, 18)), || format!("d1 value {:?}", res.value))?;
    ensure(!res.unique, || "optimum reported unique".into())?;
    let first = entries(space, &[("1", "12/18"), ("23", "4/18"), ("123", "2/18")]);
    let second = entries(space, &[("1", "11/18"), ("12", "3/18"), ("23", "4/18")]);
    for (label, mu) in [("first", first), ("second", second)] {
        ensure(p.is_feasible(&mu), || format!("{label} reference mass infeasible"))?;
        let d = p.d1_distance(&mu.zeta_transform().map_err(err)?);
        ensure(d == rat(20, 18), || format!("{label} reference mass at distance {}", d.render()))?;
    }
    Ok(())
}

fn close(label: &str, got: f64, want: f64) -> Result<(), String> {
    ensure((got - want).abs() <= D2_REFERENCE_TOLERANCE, || format!("{label} = {got}, expected {want}"))
}

fn d2_inner() -> Result<(), String> {
    let p = ApproxProblem::new(high_rate_market(), ApproxKind::Martingale, Distance::D2).map_err(err)?;
    let res = solve_inner(&p).map_err(err)?;
    close("d2", res.value.to_f64(), 0.169591)?;
    let space = p.space();
    let want = entries(space, &[("1", "0.628655"), ("2", "0.0087719"), ("12", "0.149123"), ("23", "0.18421"), ("234", "0.0292399")]);
    for a in space.events() {
        close(&format!("mu({})", space.compact_label(a)), res.mass[a].to_f64_lossy(), want[a].to_f64_lossy())?;
    }
    Ok(())
}

fn strong() -> Result<(), String> {
    let p = ApproxProblem::new(high_rate_market(), ApproxKind::StrongMartingale, Distance::D1).map_err(err)?;
    let res = solve_strong(&p).map_err(err)?;
    ensure(res.value == DistanceValue::Exact(rat(8, 3)), || format!("strong d1 value {:?}", res.value))?;
    ensure(!res.unique, || "strong d1 optimum reported unique".into())?;

    let p = ApproxProblem::new(high_rate_market(), ApproxKind::StrongMartingale, Distance::D2).map_err(err)?;
    let res = solve_strong(&p).map_err(err)?;
    close("strong d2", res.value.to_f64(), 0.572124)?;
    for (i, want) in [0.638889, 0.188596, 0.102339, 0.0701755].into_iter().enumerate() {
        close(&format!("q{}", i + 1), res.mass[1 << i].to_f64_lossy(), want)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_golden_checks_pass() {
        for c in run_all() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
