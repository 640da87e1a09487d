//! Consistency checks for lower price assessments when only the event `B`
//! that occurred may be learned, and payoffs are valued at their minimum
//! over `B`.
//!
//! An assessment avoids Dutch books iff some belief function reprices every
//! payoff through the discounted Choquet integral, and is free of
//! generalized arbitrage iff such a belief function can be chosen with
//! positive mass on every singleton. Both checks return either the
//! representing Möbius mass or a violating portfolio, and both are replayed
//! before they are returned.
//!
//! The real-world belief function never appears as an input: equivalence to
//! it reduces to positivity of the witness mass on singletons.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setfunc::{EventPayoff, LowerPayoff, RandomVariable, SetFunction, StateSpace, Subset};
use crate::solver::{lp_solve, LinearProgram, LpOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct PriceAssessment<T> {
    space: StateSpace,
    names: Vec<String>,
    payoffs: Vec<RandomVariable<T>>,
    lower: Vec<T>,
    upper: Vec<Option<T>>,
    r_factor: T,
}

/// Holdings `λ` in the assessed payoffs, plus a risk-free position that
/// pays `bond·(1+r)` at time 1 for price `bond`. The bond is zero unless a
/// certificate needs it.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio<T> {
    pub lambda: Vec<T>,
    pub bond: T,
}

impl<T: Scalar> Portfolio<T> {
    pub fn new(lambda: Vec<T>) -> Self {
        Self { lambda, bond: T::zero() }
    }

    pub fn with_bond(lambda: Vec<T>, bond: T) -> Self {
        Self { lambda, bond }
    }
}

/// `Z_λ`, `π_λ` and `G_λ = Z_λ − π_λ` of a portfolio.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioGain<T> {
    /// `Z_λ(B) = Σ_k λ_k (S̃ᵏ)^ℓ(B) + bond`.
    pub payoff: EventPayoff<T>,
    /// `π_λ = Σ_k λ_k π̲(Sᵏ) + bond`.
    pub price: T,
    pub gain: EventPayoff<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Consistent,
    DutchBook,
    /// Payoff zero on singletons and nonnegative elsewhere, at negative price.
    ArbitrageA,
    /// Payoff nonnegative everywhere and positive on some singleton, at
    /// nonpositive price.
    ArbitrageB,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub verdict: Verdict,
    /// Möbius mass of a representing belief function (when consistent).
    pub witness_mass: Option<SetFunction<T>>,
    /// Violating portfolio (otherwise).
    pub witness_portfolio: Option<Portfolio<T>>,
    /// The witness mass is positive on every singleton.
    pub strictly_positive: bool,
    /// The representing belief function is unique. Only asserted when every
    /// event indicator is among the assessed payoffs.
    pub unique: bool,
}

impl<T: Scalar> PriceAssessment<T> {
    /// One-sided assessment.
    pub fn new(space: StateSpace, payoffs: Vec<RandomVariable<T>>, lower: Vec<T>, r_factor: T) -> Result<Self> {
        let upper = vec![None; payoffs.len()];
        Self::with_upper(space, payoffs, lower, upper, r_factor)
    }

    pub fn with_upper(
        space: StateSpace,
        payoffs: Vec<RandomVariable<T>>,
        lower: Vec<T>,
        upper: Vec<Option<T>>,
        r_factor: T,
    ) -> Result<Self> {
        let names = (1..=payoffs.len()).map(|k| format!("S{k}")).collect();
        Self::named(space, names, payoffs, lower, upper, r_factor)
    }

    pub fn named(
        space: StateSpace,
        names: Vec<String>,
        payoffs: Vec<RandomVariable<T>>,
        lower: Vec<T>,
        upper: Vec<Option<T>>,
        r_factor: T,
    ) -> Result<Self> {
        let m = payoffs.len();
        if m == 0 {
            return Err(Error::InvalidAssessment("at least one payoff is required".into()));
        }
        for len in [names.len(), lower.len(), upper.len()] {
            if len != m {
                return Err(Error::LengthMismatch { expected: m, actual: len });
            }
        }
        if let Some(x) = payoffs.iter().find(|x| x.space() != space) {
            return Err(Error::LengthMismatch { expected: space.n(), actual: x.space().n() });
        }
        if !r_factor.definitely_positive() {
            return Err(Error::InvalidAssessment("risk-free factor 1+r must be positive".into()));
        }
        for (k, (lo, up)) in lower.iter().zip(&upper).enumerate() {
            if let Some(up) = up {
                if lo > up {
                    return Err(Error::InvalidAssessment(format!(
                        "lower price exceeds upper price for {}",
                        names[k]
                    )));
                }
            }
        }
        Ok(Self { space, names, payoffs, lower, upper, r_factor })
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.payoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payoffs.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn payoffs(&self) -> &[RandomVariable<T>] {
        &self.payoffs
    }

    pub fn lower_prices(&self) -> &[T] {
        &self.lower
    }

    pub fn upper_prices(&self) -> &[Option<T>] {
        &self.upper
    }

    pub fn r_factor(&self) -> &T {
        &self.r_factor
    }

    pub fn is_two_sided(&self) -> bool {
        self.upper.iter().any(Option::is_some)
    }

    /// Lower payoffs of the discounted payoffs `Sᵏ/(1+r)`.
    pub fn discounted_lower_payoffs(&self) -> Vec<LowerPayoff<T>> {
        self.payoffs
            .iter()
            .map(|x| x.map(|v| v.clone() / self.r_factor.clone()).lower_payoff())
            .collect()
    }

    fn require_one_sided(&self) -> Result<()> {
        if self.is_two_sided() {
            Err(Error::TwoSidedAssessment)
        } else {
            Ok(())
        }
    }

    /// Every indicator `𝟙_B`, `B ≠ ∅`, appears among the payoffs.
    fn spans_all_indicators(&self) -> bool {
        self.space.events().all(|b| {
            let ind = RandomVariable::indicator(self.space, b);
            self.payoffs.iter().any(|x| x == &ind)
        })
    }
}

/// Replaces each upper price `π̄(Sᵏ)` by the lower price `−π̄(Sᵏ)` of `−Sᵏ`.
pub fn normalize_two_sided<T: Scalar>(a: &PriceAssessment<T>) -> Result<PriceAssessment<T>> {
    if !a.is_two_sided() {
        return Err(Error::NoUpperPrices);
    }
    let mut names = a.names.clone();
    let mut payoffs = a.payoffs.clone();
    let mut lower = a.lower.clone();
    for (k, up) in a.upper.iter().enumerate() {
        if let Some(up) = up {
            names.push(format!("-{}", a.names[k]));
            payoffs.push(a.payoffs[k].neg());
            lower.push(-up.clone());
        }
    }
    let upper = vec![None; payoffs.len()];
    PriceAssessment::named(a.space, names, payoffs, lower, upper, a.r_factor.clone())
}

pub fn portfolio_gain<T: Scalar>(a: &PriceAssessment<T>, portfolio: &Portfolio<T>) -> Result<PortfolioGain<T>> {
    if portfolio.lambda.len() != a.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: portfolio.lambda.len() });
    }
    let lowers = a.discounted_lower_payoffs();
    let payoff = EventPayoff::from_fn(a.space, |b| {
        lowers
            .iter()
            .zip(&portfolio.lambda)
            .filter(|(_, l)| !l.is_zero())
            .fold(portfolio.bond.clone(), |acc, (low, l)| acc + l.clone() * low.get(b).clone())
    });
    let price = a
        .lower
        .iter()
        .zip(&portfolio.lambda)
        .fold(portfolio.bond.clone(), |acc, (p, l)| acc + l.clone() * p.clone());
    let gain = EventPayoff::from_fn(a.space, |b| payoff.get(b).clone() - price.clone());
    Ok(PortfolioGain { payoff, price, gain })
}

/// `G_λ` is strictly positive on every event, or strictly negative on every
/// event.
pub fn verify_dutch_book<T: Scalar>(a: &PriceAssessment<T>, portfolio: &Portfolio<T>) -> Result<bool> {
    let g = portfolio_gain(a, portfolio)?.gain;
    Ok(g.min().definitely_positive() || g.max().definitely_negative())
}

fn singletons(space: StateSpace) -> impl Iterator<Item = Subset> {
    (0..space.n()).map(move |i| 1 << i)
}

/// Condition (a): `Z_λ({i}) = 0` for all `i`, `Z_λ ≥ 0` on all events, and
/// `π_λ < 0`.
pub fn verify_arbitrage_a<T: Scalar>(a: &PriceAssessment<T>, portfolio: &Portfolio<T>) -> Result<bool> {
    let PortfolioGain { payoff, price, .. } = portfolio_gain(a, portfolio)?;
    let zero_on_singletons = singletons(a.space).all(|s| payoff.get(s).approx_zero());
    let nonnegative = payoff.iter().all(|(_, v)| !v.definitely_negative());
    Ok(zero_on_singletons && nonnegative && price.definitely_negative())
}

/// Condition (b): `Z_λ ≥ 0` on all events, positive on some singleton, and
/// `π_λ ≤ 0`.
pub fn verify_arbitrage_b<T: Scalar>(a: &PriceAssessment<T>, portfolio: &Portfolio<T>) -> Result<bool> {
    let PortfolioGain { payoff, price, .. } = portfolio_gain(a, portfolio)?;
    let nonnegative = payoff.iter().all(|(_, v)| !v.definitely_negative());
    let positive_somewhere = singletons(a.space).any(|s| payoff.get(s).definitely_positive());
    Ok(nonnegative && positive_somewhere && !price.definitely_positive())
}

/// A mass reprices every payoff: `Σ_B (S̃ᵏ)^ℓ(B)·μ(B) = π̲(Sᵏ)`, and is a
/// valid belief mass.
pub fn verify_representing_mass<T: Scalar>(a: &PriceAssessment<T>, mass: &SetFunction<T>) -> Result<bool> {
    if mass.space() != a.space {
        return Ok(false);
    }
    let valid = mass.get(0).approx_zero()
        && mass.values().iter().all(|v| !v.definitely_negative())
        && mass.total().approx_eq(&T::one());
    if !valid {
        return Ok(false);
    }
    let bel = mass.zeta_transform()?;
    for (x, price) in a.payoffs.iter().zip(&a.lower) {
        let value = bel.choquet(x)? / a.r_factor.clone();
        if !value.approx_eq(price) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Variables `μ_B` for `B = 1..2ⁿ−1` (index `B − 1`), rows
/// `Σ_B (S̃ᵏ)^ℓ(B) μ_B = π̲_k` and `Σ_B μ_B = 1`.
fn representation_lp<T: Scalar>(a: &PriceAssessment<T>, extra_vars: usize) -> LinearProgram<T> {
    let space = a.space;
    let events = space.size() - 1;
    let mut lp = LinearProgram::new(events + extra_vars);
    for (low, price) in a.discounted_lower_payoffs().iter().zip(&a.lower) {
        let mut row: Vec<T> = space.events().map(|b| low.get(b).clone()).collect();
        row.resize(events + extra_vars, T::zero());
        lp.add_eq(row, price.clone());
    }
    let mut ones = vec![T::one(); events];
    ones.resize(events + extra_vars, T::zero());
    lp.add_eq(ones, T::one());
    lp
}

fn mass_from_primal<T: Scalar>(space: StateSpace, primal: &[T]) -> SetFunction<T> {
    SetFunction::from_entries(space, space.events().map(|b| (b, primal[b as usize - 1].clone())))
}

fn positive_on_singletons<T: Scalar>(mass: &SetFunction<T>) -> bool {
    singletons(mass.space()).all(|s| mass.get(s).definitely_positive())
}

fn consistent<T: Scalar>(a: &PriceAssessment<T>, mass: SetFunction<T>, strictly_positive: bool) -> Result<Certificate<T>> {
    if !verify_representing_mass(a, &mass)? {
        return Err(Error::CertificateRejected("witness mass does not reprice the assessment".into()));
    }
    Ok(Certificate {
        verdict: Verdict::Consistent,
        witness_mass: Some(mass),
        witness_portfolio: None,
        strictly_positive,
        unique: a.spans_all_indicators(),
    })
}

fn violated<T: Scalar>(verdict: Verdict, portfolio: Portfolio<T>) -> Certificate<T> {
    Certificate { verdict, witness_mass: None, witness_portfolio: Some(portfolio), strictly_positive: false, unique: false }
}

/// Searches for a belief function repricing the assessment; otherwise
/// returns a portfolio with uniformly one-signed gain, read off the Farkas
/// ray of the infeasible system.
pub fn check_dutch_book<T: Scalar>(a: &PriceAssessment<T>) -> Result<Certificate<T>> {
    a.require_one_sided()?;
    let lp = representation_lp(a, 0);
    match lp_solve(&lp)? {
        LpOutcome::Optimal { primal, .. } => {
            let mass = mass_from_primal(a.space, &primal);
            let positive = positive_on_singletons(&mass);
            consistent(a, mass, positive)
        }
        LpOutcome::Infeasible { farkas } => {
            let portfolio = Portfolio::new(farkas[..a.len()].to_vec());
            if !verify_dutch_book(a, &portfolio)? {
                return Err(Error::CertificateRejected("Farkas portfolio has a gain of mixed sign".into()));
            }
            Ok(violated(Verdict::DutchBook, portfolio))
        }
        LpOutcome::Unbounded { .. } => unreachable!("feasibility program has a zero objective"),
    }
}

/// Searches for a representing belief function with positive singleton
/// masses by maximizing a common lower bound `t` on them; `t* > 0`
/// decides. Otherwise returns a portfolio meeting condition (a) or (b).
///
/// Portfolios in the assessed payoffs alone are tried first. When none
/// exists the certificate also holds the risk-free bond, which is always
/// priced consistently; conditions (a) and (b) are then checked on the
/// combined position.
pub fn check_no_arbitrage<T: Scalar>(a: &PriceAssessment<T>) -> Result<Certificate<T>> {
    a.require_one_sided()?;
    let space = a.space;
    let events = space.size() - 1;
    let t = events;
    let mut lp = representation_lp(a, 1);
    for s in singletons(space) {
        let row = lp.sparse_row([(s as usize - 1, T::one()), (t, -T::one())]);
        lp.add_ge(row, T::zero());
    }
    let bound = lp.sparse_row([(t, T::one())]);
    lp.add_le(bound, T::one());
    lp.set_free(t);
    let objective = lp.sparse_row([(t, -T::one())]);
    lp.set_objective(objective);
    if let LpOutcome::Optimal { primal, .. } = lp_solve(&lp)? {
        if primal[t].definitely_positive() {
            return consistent(a, mass_from_primal(space, &primal), true);
        }
    }
    for with_bond in [false, true] {
        if let Some(p) = arbitrage_portfolio(a, Verdict::ArbitrageA, with_bond)? {
            return Ok(violated(Verdict::ArbitrageA, p));
        }
        if let Some(p) = arbitrage_portfolio(a, Verdict::ArbitrageB, with_bond)? {
            return Ok(violated(Verdict::ArbitrageB, p));
        }
    }
    Err(Error::CertificateRejected("no representing mass and no arbitrage portfolio".into()))
}

/// Solves for a portfolio meeting condition (a) or (b), normalized so the
/// strict inequality has margin one.
fn arbitrage_portfolio<T: Scalar>(a: &PriceAssessment<T>, form: Verdict, with_bond: bool) -> Result<Option<Portfolio<T>>> {
    let space = a.space;
    let m = a.len();
    let vars = m + usize::from(with_bond);
    let lowers = a.discounted_lower_payoffs();
    let mut lp = LinearProgram::new(vars);
    for j in 0..vars {
        lp.set_free(j);
    }
    let payoff_row = |b: Subset| {
        let mut row: Vec<T> = lowers.iter().map(|low| low.get(b).clone()).collect();
        if with_bond {
            row.push(T::one());
        }
        row
    };
    let mut price_row = a.lower.clone();
    if with_bond {
        price_row.push(T::one());
    }
    for b in space.events() {
        let is_singleton = b.count_ones() == 1;
        if is_singleton && form == Verdict::ArbitrageA {
            lp.add_eq(payoff_row(b), T::zero());
        } else {
            lp.add_ge(payoff_row(b), T::zero());
        }
    }
    match form {
        Verdict::ArbitrageA => {
            lp.add_le(price_row, -T::one());
        }
        _ => {
            let mut total = vec![T::zero(); vars];
            for s in singletons(space) {
                for (t, v) in total.iter_mut().zip(payoff_row(s)) {
                    *t = t.clone() + v;
                }
            }
            lp.add_ge(total, T::one());
            lp.add_le(price_row, T::zero());
        }
    }
    let LpOutcome::Optimal { primal, .. } = lp_solve(&lp)? else {
        return Ok(None);
    };
    let bond = if with_bond { primal[m].clone() } else { T::zero() };
    let portfolio = Portfolio::with_bond(primal[..m].to_vec(), bond);
    let ok = match form {
        Verdict::ArbitrageA => verify_arbitrage_a(a, &portfolio)?,
        _ => verify_arbitrage_b(a, &portfolio)?,
    };
    if !ok {
        return Err(Error::CertificateRejected(format!("{form:?} portfolio failed replay")));
    }
    Ok(Some(portfolio))
}

/// Replays a certificate against the assessment it was issued for.
pub fn verify_certificate<T: Scalar>(a: &PriceAssessment<T>, cert: &Certificate<T>) -> Result<bool> {
    match (cert.verdict, &cert.witness_mass, &cert.witness_portfolio) {
        (Verdict::Consistent, Some(mass), None) => {
            Ok(verify_representing_mass(a, mass)? && (!cert.strictly_positive || positive_on_singletons(mass)))
        }
        (Verdict::DutchBook, None, Some(p)) => verify_dutch_book(a, p),
        (Verdict::ArbitrageA, None, Some(p)) => verify_arbitrage_a(a, p),
        (Verdict::ArbitrageB, None, Some(p)) => verify_arbitrage_b(a, p),
        _ => Ok(false),
    }
}
