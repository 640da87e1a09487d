//! Random instances with small exact rational entries, for property tests
//! and benchmarks.

use rand::seq::index::sample;
use rand::Rng;

use crate::arbitrage::PriceAssessment;
use crate::market::MarketModel;
use crate::scalar::{rat, Rational};
use crate::setfunc::{is_subset, RandomVariable, SetFunction, StateSpace};

/// A viable model with `n` distinct returns on a grid of eighths. About a
/// quarter of the models put `1+r` exactly on an interior return.
pub fn random_market<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MarketModel<Rational> {
    assert!(n >= 2, "markets need at least two states");
    let mut grid: Vec<i64> = sample(rng, 48, n).into_iter().map(|k| k as i64 + 1).collect();
    grid.sort_unstable_by(|a, b| b.cmp(a));
    let m: Vec<Rational> = grid.iter().map(|&k| rat(k, 8)).collect();
    let r_factor = if n > 2 && rng.random_bool(0.25) {
        m[rng.random_range(1..n - 1)].clone()
    } else {
        let lo = rng.random_range(0..n - 1);
        let t = rat(rng.random_range(1..8), 8);
        m[lo + 1].clone() + t * (m[lo].clone() - m[lo + 1].clone())
    };
    let s0 = rat(rng.random_range(1..=50), 1);
    MarketModel::new(m, r_factor, s0, None).expect("viable by construction")
}

/// Nonnegative mass on a random family of events, summing to one.
pub fn random_mass<R: Rng + ?Sized>(rng: &mut R, space: StateSpace) -> SetFunction<Rational> {
    let density = rng.random_range(0.1..0.9);
    let raw = SetFunction::from_fn(space, |a| {
        if a != 0 && rng.random_bool(density) {
            rat(rng.random_range(1..=20), 1)
        } else {
            rat(0, 1)
        }
    });
    let total = raw.total();
    if total == rat(0, 1) {
        return SetFunction::vacuous_mass(space);
    }
    raw.map(|v| v / &total)
}

/// Mass that is strictly positive on every singleton.
pub fn random_positive_mass<R: Rng + ?Sized>(rng: &mut R, space: StateSpace) -> SetFunction<Rational> {
    let base = random_mass(rng, space);
    let uniform = SetFunction::from_fn(space, |a| if a.count_ones() == 1 { rat(1, space.n() as i64) } else { rat(0, 1) });
    let w = rat(rng.random_range(1..=9), 10);
    SetFunction::combine(&base, &(rat(1, 1) - &w), &uniform, &w)
}

pub fn random_belief<R: Rng + ?Sized>(rng: &mut R, space: StateSpace) -> SetFunction<Rational> {
    random_mass(rng, space).zeta_transform().expect("zero on the empty set")
}

pub fn random_probability<R: Rng + ?Sized>(rng: &mut R, space: StateSpace) -> Vec<Rational> {
    let raw: Vec<i64> = (0..space.n()).map(|_| rng.random_range(0..=10)).collect();
    let total: i64 = raw.iter().sum();
    if total == 0 {
        return (0..space.n()).map(|_| rat(1, space.n() as i64)).collect();
    }
    raw.into_iter().map(|k| rat(k, total)).collect()
}

/// Monotone capacity, generally not 2-monotone: the running maximum of
/// random values over subsets.
pub fn random_capacity<R: Rng + ?Sized>(rng: &mut R, space: StateSpace) -> SetFunction<Rational> {
    let raw: Vec<i64> = space.subsets().map(|_| rng.random_range(0..=100)).collect();
    SetFunction::from_fn(space, |a| {
        if a == 0 {
            rat(0, 1)
        } else if a == space.full() {
            rat(1, 1)
        } else {
            let peak = space.subsets().filter(|&b| b != 0 && is_subset(b, a)).map(|b| raw[b as usize]).max().unwrap_or(0);
            rat(peak, 101)
        }
    })
}

pub fn random_variable<R: Rng + ?Sized>(rng: &mut R, space: StateSpace) -> RandomVariable<Rational> {
    RandomVariable::new(space, (0..space.n()).map(|_| rat(rng.random_range(-20..=20), 1)).collect()).expect("length n")
}

/// An assessment of `k` random payoffs. Half the time the prices come from
/// a random belief function (so a witness exists); otherwise they are
/// perturbed, which usually yields a violation.
pub fn random_assessment<R: Rng + ?Sized>(rng: &mut R, space: StateSpace, k: usize) -> PriceAssessment<Rational> {
    let r_factor = rat(rng.random_range(8..=12), 10);
    let payoffs: Vec<_> = (0..k).map(|_| random_variable(rng, space)).collect();
    let bel = if rng.random_bool(0.5) { random_belief(rng, space) } else { random_positive_mass(rng, space).zeta_transform().expect("mass") };
    let mut lower: Vec<Rational> = payoffs.iter().map(|x| bel.choquet(x).expect("capacity") / &r_factor).collect();
    if rng.random_bool(0.5) {
        for p in lower.iter_mut() {
            *p += rat(rng.random_range(-6..=6), 2);
        }
    }
    PriceAssessment::new(space, payoffs, lower, r_factor).expect("valid")
}
