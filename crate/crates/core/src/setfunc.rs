//! Set functions on a finite state space `Ω = {1, …, n}`.
//!
//! Subsets are `u32` bitmasks with state `i` stored in bit `i - 1`, and a
//! [`SetFunction`] keeps one value per mask in a dense `2^n` array. The same
//! type carries capacities, belief functions, probabilities and Möbius
//! masses; [`SetFunction::classify`] tells them apart.

use std::collections::BTreeSet;
use std::cmp::Ordering;
use std::ops::Index;

use itertools::Itertools;

use crate::error::{CapacityViolation, Error, Result};
use crate::scalar::Scalar;

/// Largest supported state count (storage is `2^n` values).
pub const MAX_STATES: usize = 20;
/// Largest state count for operations enumerating all `n!` permutations.
pub const MAX_ENUMERATION_STATES: usize = 10;

/// A subset of `Ω` as a bitmask.
pub type Subset = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateSpace {
    n: usize,
}

impl StateSpace {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_STATES).contains(&n) {
            return Err(Error::InvalidStateCount { n, min: 2, max: MAX_STATES });
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of subsets, `2^n`.
    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn full(&self) -> Subset {
        ((1u64 << self.n) - 1) as Subset
    }

    /// Mask of the single state with 0-based index `i`.
    pub fn singleton(&self, i: usize) -> Subset {
        debug_assert!(i < self.n);
        1 << i
    }

    pub fn complement(&self, a: Subset) -> Subset {
        self.full() & !a
    }

    /// All subsets, empty set first, in mask order.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        0..(self.size() as Subset)
    }

    /// All nonempty subsets in mask order.
    pub fn events(&self) -> impl Iterator<Item = Subset> {
        1..(self.size() as Subset)
    }

    /// Subsets ordered by cardinality, then lexicographically by sorted
    /// state list: `∅, 1, 2, …, 12, 13, …, Ω`.
    pub fn display_order(&self) -> Vec<Subset> {
        let mut all: Vec<Subset> = self.subsets().collect();
        all.sort_by(|&a, &b| {
            a.count_ones()
                .cmp(&b.count_ones())
                .then_with(|| members(a).cmp(members(b)))
        });
        all
    }

    /// Comma-separated sorted 1-based state list, e.g. `"1,3"`; `""` for `∅`.
    pub fn label(&self, a: Subset) -> String {
        members(a).map(|i| (i + 1).to_string()).join(",")
    }

    /// Compact label as in the literature tables: `"13"`, `"∅"`, `"Ω"`.
    pub fn compact_label(&self, a: Subset) -> String {
        if a == 0 {
            return "∅".to_string();
        }
        if a == self.full() {
            return "Ω".to_string();
        }
        let sep = if self.n >= 10 { "," } else { "" };
        members(a).map(|i| (i + 1).to_string()).join(sep)
    }

    /// Parses a comma-separated 1-based state list (`""` is the empty set).
    pub fn parse_label(&self, label: &str) -> Option<Subset> {
        let label = label.trim();
        if label.is_empty() {
            return Some(0);
        }
        let mut mask = 0;
        for part in label.split(',') {
            let state: usize = part.trim().parse().ok()?;
            if state == 0 || state > self.n {
                return None;
            }
            mask |= 1 << (state - 1);
        }
        Some(mask)
    }

    /// Mask of the 1-based state range `lo..=hi`.
    pub fn range(&self, lo: usize, hi: usize) -> Subset {
        (lo..=hi).fold(0, |acc, s| acc | (1 << (s - 1)))
    }
}

/// 0-based indices of the states in `a`, ascending.
pub fn members(a: Subset) -> impl Iterator<Item = usize> + Clone {
    (0..Subset::BITS as usize).filter(move |&i| a >> i & 1 == 1)
}

pub fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

/// Finest label applicable to a capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CapacityClass {
    Probability,
    Necessity,
    Belief,
    Capacity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetFunction<T> {
    space: StateSpace,
    values: Vec<T>,
}

impl<T: Scalar> SetFunction<T> {
    pub fn new(space: StateSpace, values: Vec<T>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::LengthMismatch { expected: space.size(), actual: values.len() });
        }
        Ok(Self { space, values })
    }

    pub fn zeros(space: StateSpace) -> Self {
        Self { space, values: vec![T::zero(); space.size()] }
    }

    pub fn from_fn(space: StateSpace, f: impl FnMut(Subset) -> T) -> Self {
        Self { space, values: space.subsets().map(f).collect() }
    }

    /// Sparse construction: unspecified subsets are zero.
    pub fn from_entries(space: StateSpace, entries: impl IntoIterator<Item = (Subset, T)>) -> Self {
        let mut out = Self::zeros(space);
        for (a, v) in entries {
            out.values[a as usize] = v;
        }
        out
    }

    /// The additive measure with the given point masses.
    pub fn from_probability(space: StateSpace, point_masses: &[T]) -> Result<Self> {
        if point_masses.len() != space.n() {
            return Err(Error::LengthMismatch { expected: space.n(), actual: point_masses.len() });
        }
        Ok(Self::from_fn(space, |a| {
            members(a).fold(T::zero(), |acc, i| acc + point_masses[i].clone())
        }))
    }

    /// Möbius mass of the vacuous belief function (all mass on `Ω`).
    pub fn vacuous_mass(space: StateSpace) -> Self {
        Self::from_entries(space, [(space.full(), T::one())])
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, a: Subset) -> &T {
        &self.values[a as usize]
    }

    /// Values on the singletons `{1}, …, {n}`.
    pub fn singleton_values(&self) -> Vec<T> {
        (0..self.space.n()).map(|i| self.values[1 << i].clone()).collect()
    }

    /// Subsets with nonzero value (focal elements when `self` is a mass).
    pub fn support(&self) -> Vec<Subset> {
        self.space.subsets().filter(|&a| !self.get(a).approx_zero()).collect()
    }

    pub fn total(&self) -> T {
        self.values.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self { space: self.space, values: self.values.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    /// `wa·a + wb·b`, eventwise.
    pub fn combine(a: &Self, wa: &T, b: &Self, wb: &T) -> Self {
        assert_eq!(a.space, b.space, "set functions on different state spaces");
        Self {
            space: a.space,
            values: a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| wa.clone() * x.clone() + wb.clone() * y.clone())
                .collect(),
        }
    }

    /// Eventwise comparison within the scalar tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.space == other.space && self.values.iter().zip(&other.values).all(|(a, b)| a.approx_eq(b))
    }

    /// `self(A) <= other(A)` for every `A`, within tolerance.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.space == other.space
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| !(a.clone() - b.clone()).definitely_positive())
    }

    /// `φ(A) = Σ_{B⊆A} mass(B)` by the `O(n·2^n)` subset-sum transform.
    pub fn zeta_transform(&self) -> Result<Self> {
        if !self.values[0].approx_zero() {
            return Err(Error::InvalidMass);
        }
        let mut v = self.values.clone();
        for bit in 0..self.space.n() {
            let b = 1usize << bit;
            for a in 0..v.len() {
                if a & b != 0 {
                    let lower = v[a ^ b].clone();
                    v[a] = v[a].clone() + lower;
                }
            }
        }
        Ok(Self { space: self.space, values: v })
    }

    /// Möbius inverse `μ(A) = Σ_{B⊆A} (−1)^{|A∖B|} φ(B)`.
    pub fn moebius_transform(&self) -> Result<Self> {
        if !self.values[0].approx_zero() {
            return Err(Error::NotACapacity { reason: CapacityViolation::EmptySetNonzero });
        }
        let mut v = self.values.clone();
        for bit in 0..self.space.n() {
            let b = 1usize << bit;
            for a in 0..v.len() {
                if a & b != 0 {
                    let lower = v[a ^ b].clone();
                    v[a] = v[a].clone() - lower;
                }
            }
        }
        Ok(Self { space: self.space, values: v })
    }

    /// Checks the capacity axioms: `φ(∅) = 0`, `φ(Ω) = 1`, monotone.
    pub fn check_capacity(&self) -> Result<()> {
        if !self.values[0].approx_zero() {
            return Err(Error::NotACapacity { reason: CapacityViolation::EmptySetNonzero });
        }
        if !self.get(self.space.full()).approx_eq(&T::one()) {
            return Err(Error::NotACapacity { reason: CapacityViolation::FullSetNotOne });
        }
        for a in self.space.subsets() {
            for i in 0..self.space.n() {
                let bigger = a | (1 << i);
                if bigger != a && (self.get(a).clone() - self.get(bigger).clone()).definitely_positive() {
                    return Err(Error::NotACapacity {
                        reason: CapacityViolation::Monotonicity { subset: a, superset: bigger },
                    });
                }
            }
        }
        Ok(())
    }

    /// Belief test: a capacity with nonnegative Möbius mass.
    pub fn check_belief(&self) -> Result<Self> {
        self.check_capacity()?;
        let mass = self.moebius_transform()?;
        if let Some(a) = self.space.subsets().find(|&a| mass.get(a).definitely_negative()) {
            return Err(Error::NotBelief { subset: a });
        }
        Ok(mass)
    }

    pub fn is_belief(&self) -> bool {
        self.check_belief().is_ok()
    }

    pub fn classify(&self) -> Result<CapacityClass> {
        self.check_capacity()?;
        let mass = self.moebius_transform()?;
        if self.space.subsets().any(|a| mass.get(a).definitely_negative()) {
            return Ok(CapacityClass::Capacity);
        }
        let focal = mass.support();
        if focal.iter().all(|a| a.count_ones() == 1) {
            return Ok(CapacityClass::Probability);
        }
        let chain = focal
            .iter()
            .tuple_combinations()
            .all(|(&a, &b)| is_subset(a, b) || is_subset(b, a));
        Ok(if chain { CapacityClass::Necessity } else { CapacityClass::Belief })
    }

    /// Dual capacity `ψ(A) = 1 − φ(Ω∖A)`.
    pub fn dual(&self) -> Self {
        let space = self.space;
        Self::from_fn(space, |a| T::one() - self.get(space.complement(a)).clone())
    }

    /// Choquet integral by the sorted-permutation formula. Ties are broken
    /// by ascending state index.
    pub fn choquet(&self, x: &RandomVariable<T>) -> Result<T> {
        self.check_capacity()?;
        self.assert_same_space(x.space)?;
        Ok(self.choquet_sorted(x))
    }

    pub(crate) fn choquet_sorted(&self, x: &RandomVariable<T>) -> T {
        let order = x.descending_order();
        let mut acc = T::zero();
        let mut level = 0;
        for (k, &state) in order.iter().enumerate() {
            level |= 1 << state;
            let next = order.get(k + 1).map_or_else(T::zero, |&s| x.payoff[s].clone());
            let step = x.payoff[state].clone() - next;
            acc = acc + step * self.get(level).clone();
        }
        acc
    }

    /// Choquet integral through the Möbius mass, `Σ_B X^ℓ(B)·μ(B)`.
    pub fn choquet_moebius(&self, x: &RandomVariable<T>) -> Result<T> {
        self.assert_same_space(x.space)?;
        let mass = self.moebius_transform()?;
        Ok(expectation_under_mass(&mass, &x.lower_payoff()))
    }

    /// Marginal vector of `self` along a permutation of 0-based states:
    /// `q_{σ(k)} = φ(E_k) − φ(E_{k−1})`.
    pub fn marginal_vector(&self, perm: &[usize]) -> Vec<T> {
        let mut q = vec![T::zero(); self.space.n()];
        let mut prefix = 0;
        for &state in perm {
            let next = prefix | (1 << state);
            q[state] = self.get(next).clone() - self.get(prefix).clone();
            prefix = next;
        }
        q
    }

    /// Distinct marginal vectors over all permutations, i.e. the vertices
    /// of the core of a belief function, as point-mass vectors.
    pub fn core_vertex_weights(&self) -> Result<Vec<Vec<T>>> {
        let n = self.space.n();
        if n > MAX_ENUMERATION_STATES {
            return Err(Error::TooLarge { n, max: MAX_ENUMERATION_STATES });
        }
        self.check_belief()?;
        let mut seen = BTreeSet::new();
        for perm in (0..n).permutations(n) {
            seen.insert(TotalVec(self.marginal_vector(&perm)));
        }
        Ok(seen.into_iter().map(|v| v.0).collect())
    }

    /// Core vertices as probability set functions.
    pub fn core_vertices(&self) -> Result<Vec<Self>> {
        self.core_vertex_weights()?
            .iter()
            .map(|q| Self::from_probability(self.space, q))
            .collect()
    }

    fn assert_same_space(&self, other: StateSpace) -> Result<()> {
        if self.space != other {
            return Err(Error::LengthMismatch { expected: self.space.n(), actual: other.n() });
        }
        Ok(())
    }
}

impl<T> Index<Subset> for SetFunction<T> {
    type Output = T;

    fn index(&self, a: Subset) -> &T {
        &self.values[a as usize]
    }
}

/// `Σ_{B ∈ 𝒰} X^ℓ(B)·μ(B)`.
pub fn expectation_under_mass<T: Scalar>(mass: &SetFunction<T>, lower: &LowerPayoff<T>) -> T {
    mass.space
        .events()
        .filter(|&b| !mass.get(b).is_zero())
        .fold(T::zero(), |acc, b| acc + lower.get(b).clone() * mass.get(b).clone())
}

/// Lexicographic total order over vectors of a partially ordered scalar.
#[derive(Debug, Clone)]
struct TotalVec<T>(Vec<T>);

impl<T: PartialOrd> PartialEq for TotalVec<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for TotalVec<T> {}

impl<T: PartialOrd> PartialOrd for TotalVec<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for TotalVec<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.partial_cmp(b).unwrap_or(Ordering::Equal) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

/// A payoff `X: Ω → ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable<T> {
    space: StateSpace,
    payoff: Vec<T>,
}

impl<T: Scalar> RandomVariable<T> {
    pub fn new(space: StateSpace, payoff: Vec<T>) -> Result<Self> {
        if payoff.len() != space.n() {
            return Err(Error::LengthMismatch { expected: space.n(), actual: payoff.len() });
        }
        Ok(Self { space, payoff })
    }

    pub fn constant(space: StateSpace, c: T) -> Self {
        Self { space, payoff: vec![c; space.n()] }
    }

    pub fn indicator(space: StateSpace, a: Subset) -> Self {
        Self {
            space,
            payoff: (0..space.n())
                .map(|i| if a >> i & 1 == 1 { T::one() } else { T::zero() })
                .collect(),
        }
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn values(&self) -> &[T] {
        &self.payoff
    }

    pub fn get(&self, state: usize) -> &T {
        &self.payoff[state]
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self { space: self.space, payoff: self.payoff.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            space: self.space,
            payoff: self.payoff.iter().zip(&other.payoff).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    /// Linear expectation under point masses `q`.
    pub fn expectation(&self, q: &[T]) -> T {
        self.payoff.iter().zip(q).fold(T::zero(), |acc, (x, p)| acc + x.clone() * p.clone())
    }

    /// `(X(i) − X(j))(Y(i) − Y(j)) ≥ 0` for all `i, j`.
    pub fn is_comonotonic(&self, other: &Self) -> bool {
        (0..self.space.n()).tuple_combinations().all(|(i, j)| {
            let d = (self.payoff[i].clone() - self.payoff[j].clone())
                * (other.payoff[i].clone() - other.payoff[j].clone());
            !d.definitely_negative()
        })
    }

    /// States sorted by decreasing payoff, ties by ascending index.
    fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.space.n()).collect();
        order.sort_by(|&a, &b| {
            self.payoff[b]
                .partial_cmp(&self.payoff[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        order
    }

    /// `X^ℓ(B) = min_{i∈B} X(i)` on every nonempty `B`, by min-propagation.
    pub fn lower_payoff(&self) -> LowerPayoff<T> {
        let size = self.space.size();
        let mut values = vec![T::zero(); size];
        for a in 1..size {
            let low = a.trailing_zeros() as usize;
            let rest = a & (a - 1);
            let own = &self.payoff[low];
            values[a] = if rest == 0 || *own <= values[rest] { own.clone() } else { values[rest].clone() };
        }
        LowerPayoff { space: self.space, values }
    }
}

/// Per-event minimum of a random variable; `values[0]` is a placeholder for
/// the empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerPayoff<T> {
    space: StateSpace,
    values: Vec<T>,
}

impl<T: Scalar> LowerPayoff<T> {
    /// Builds from explicit per-event values, checking that they are
    /// nonincreasing under inclusion.
    pub fn from_values(space: StateSpace, values: Vec<T>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::LengthMismatch { expected: space.size(), actual: values.len() });
        }
        for a in space.events() {
            for i in 0..space.n() {
                let c = a | (1 << i);
                if c != a && (values[c as usize].clone() - values[a as usize].clone()).definitely_positive() {
                    return Err(Error::InvalidAssessment(format!(
                        "lower payoff increases from {} to {}",
                        space.label(a),
                        space.label(c)
                    )));
                }
            }
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn get(&self, b: Subset) -> &T {
        debug_assert!(b != 0, "lower payoff is undefined on the empty set");
        &self.values[b as usize]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// A function on nonempty events with no monotonicity requirement, e.g. the
/// payoff `Z_λ = Σ_k λ_k (S̃ᵏ)^ℓ` of a portfolio. `values[0]` is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct EventPayoff<T> {
    space: StateSpace,
    values: Vec<T>,
}

impl<T: Scalar> EventPayoff<T> {
    pub fn zeros(space: StateSpace) -> Self {
        Self { space, values: vec![T::zero(); space.size()] }
    }

    pub fn from_fn(space: StateSpace, mut f: impl FnMut(Subset) -> T) -> Self {
        let mut values = vec![T::zero(); space.size()];
        for b in space.events() {
            values[b as usize] = f(b);
        }
        Self { space, values }
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn get(&self, b: Subset) -> &T {
        &self.values[b as usize]
    }

    /// Iterator over `(B, value)` for nonempty `B`.
    pub fn iter(&self) -> impl Iterator<Item = (Subset, &T)> {
        self.space.events().map(move |b| (b, &self.values[b as usize]))
    }

    pub fn min(&self) -> T {
        self.iter().map(|(_, v)| v.clone()).reduce(|a, b| if b < a { b } else { a }).expect("n >= 2")
    }

    pub fn max(&self) -> T {
        self.iter().map(|(_, v)| v.clone()).reduce(|a, b| if b > a { b } else { a }).expect("n >= 2")
    }
}

impl<T: Scalar> From<LowerPayoff<T>> for EventPayoff<T> {
    fn from(l: LowerPayoff<T>) -> Self {
        Self { space: l.space, values: l.values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use proptest::prelude::*;

    fn space(n: usize) -> StateSpace {
        StateSpace::new(n).unwrap()
    }

    fn r(v: i64) -> Rational {
        rat(v, 1)
    }

    /// Möbius mass of the Example-1 lower envelope.
    fn four_state_mass() -> SetFunction<Rational> {
        let s = space(4);
        SetFunction::from_entries(
            s,
            [
                (s.range(1, 2), rat(15, 105)),
                (s.range(3, 4), rat(60, 105)),
                (s.range(1, 3), rat(6, 105)),
                (s.range(2, 4), rat(24, 105)),
            ],
        )
    }

    fn naive_zeta(mass: &SetFunction<Rational>) -> Vec<Rational> {
        let s = mass.space();
        s.subsets()
            .map(|a| s.subsets().filter(|&b| is_subset(b, a)).map(|b| mass[b].clone()).sum())
            .collect()
    }

    #[test]
    fn state_space_bounds() {
        assert!(StateSpace::new(1).is_err());
        assert!(StateSpace::new(21).is_err());
        assert_eq!(space(4).full(), 0b1111);
        assert_eq!(space(4).label(0b101), "1,3");
        assert_eq!(space(4).parse_label("1,3"), Some(0b101));
        assert_eq!(space(4).parse_label("5"), None);
        assert_eq!(space(4).compact_label(0b110), "23");
    }

    #[test]
    fn display_order_matches_table_layout() {
        let s = space(3);
        let labels: Vec<String> = s.display_order().into_iter().map(|a| s.compact_label(a)).collect();
        assert_eq!(labels, ["∅", "1", "2", "3", "12", "13", "23", "Ω"]);
    }

    #[test]
    fn zeta_of_vacuous_mass() {
        let s = space(3);
        let bel = SetFunction::<Rational>::vacuous_mass(s).zeta_transform().unwrap();
        for a in s.subsets() {
            let expected = if a == s.full() { r(1) } else { r(0) };
            assert_eq!(bel[a], expected);
        }
    }

    #[test]
    fn zeta_of_four_state_mass_gives_envelope_row() {
        let s = space(4);
        let q = four_state_mass().zeta_transform().unwrap();
        assert_eq!(q[s.range(1, 3)], rat(21, 105));
        assert_eq!(q[s.range(2, 4)], rat(84, 105));
        assert_eq!(q[0b1101], rat(60, 105));
        assert_eq!(q[0b1011], rat(15, 105));
        assert_eq!(q[s.range(1, 2)], rat(15, 105));
        assert_eq!(q[s.range(3, 4)], rat(60, 105));
        assert_eq!(q[s.full()], r(1));
        assert_eq!(q[0b0101], r(0));
    }

    #[test]
    fn zeta_rejects_mass_on_empty_set() {
        let s = space(2);
        let bad = SetFunction::from_entries(s, [(0, r(1))]);
        assert_eq!(bad.zeta_transform(), Err(Error::InvalidMass));
    }

    #[test]
    fn moebius_of_probability_sits_on_singletons() {
        let s = space(3);
        let p = SetFunction::from_probability(s, &[rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        let mass = p.moebius_transform().unwrap();
        assert_eq!(mass.support(), vec![1, 2, 4]);
        assert_eq!(mass.singleton_values(), vec![rat(1, 2), rat(1, 3), rat(1, 6)]);
    }

    #[test]
    fn moebius_recovers_four_state_mass() {
        let q = four_state_mass().zeta_transform().unwrap();
        assert_eq!(q.moebius_transform().unwrap(), four_state_mass());
    }

    #[test]
    fn classification_cases() {
        let s = space(4);
        let q = four_state_mass().zeta_transform().unwrap();
        assert_eq!(q.classify().unwrap(), CapacityClass::Belief);

        let n1 = SetFunction::from_entries(s, [(s.range(1, 2), rat(15, 21)), (s.range(1, 3), rat(6, 21))])
            .zeta_transform()
            .unwrap();
        assert_eq!(n1.classify().unwrap(), CapacityClass::Necessity);

        let uniform = SetFunction::from_probability(space(3), &[rat(1, 3), rat(1, 3), rat(1, 3)]).unwrap();
        assert_eq!(uniform.classify().unwrap(), CapacityClass::Probability);
    }

    #[test]
    fn classification_of_non_belief_capacity() {
        // phi = 1 on sets with at least two of three states: mass on pairs is
        // positive, on Ω it is 1 - 3 = -2.
        let s = space(3);
        let phi = SetFunction::from_fn(s, |a| if a.count_ones() >= 2 { r(1) } else { r(0) });
        assert_eq!(phi.classify().unwrap(), CapacityClass::Capacity);
        assert!(matches!(phi.check_belief(), Err(Error::NotBelief { subset: 0b111 })));
    }

    #[test]
    fn classification_rejects_non_capacities() {
        let s = space(2);
        let not_monotone = SetFunction::new(s, vec![r(0), rat(1, 2), r(0), r(1)]).unwrap();
        // {1} has 1/2 but its superset {1,2} is fine; {2}=0; mono holds. Make {1} > {1,2}.
        let mut v = not_monotone.into_values();
        v[1] = rat(3, 2);
        let bad = SetFunction::new(s, v).unwrap();
        assert_eq!(
            bad.classify(),
            Err(Error::NotACapacity {
                reason: CapacityViolation::Monotonicity { subset: 0b01, superset: 0b11 }
            })
        );
        let not_normalized = SetFunction::new(s, vec![r(0), r(0), r(0), rat(1, 2)]).unwrap();
        assert_eq!(
            not_normalized.classify(),
            Err(Error::NotACapacity { reason: CapacityViolation::FullSetNotOne })
        );
        let empty_nonzero = SetFunction::new(s, vec![rat(1, 2), r(1), r(1), r(1)]).unwrap();
        assert_eq!(
            empty_nonzero.check_capacity(),
            Err(Error::NotACapacity { reason: CapacityViolation::EmptySetNonzero })
        );
    }

    #[test]
    fn dual_cases() {
        let s = space(3);
        let p = SetFunction::from_probability(s, &[rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        assert_eq!(p.dual(), p);
        let vacuous = SetFunction::<Rational>::vacuous_mass(s).zeta_transform().unwrap();
        let pl = vacuous.dual();
        for a in s.subsets() {
            assert_eq!(pl[a], if a == 0 { r(0) } else { r(1) });
        }
    }

    #[test]
    fn dual_of_envelope_is_max_over_extreme_points() {
        // Extreme points Q_{1,3}, Q_{1,4}, Q_{2,3}, Q_{2,4} of the Example-1 market.
        let s = space(4);
        let points = [
            [rat(15, 105), r(0), rat(90, 105), r(0)],
            [rat(21, 105), r(0), r(0), rat(84, 105)],
            [r(0), rat(35, 105), rat(70, 105), r(0)],
            [r(0), rat(45, 105), r(0), rat(60, 105)],
        ];
        let upper = four_state_mass().zeta_transform().unwrap().dual();
        for a in s.subsets() {
            let max = points
                .iter()
                .map(|q| members(a).map(|i| q[i].clone()).sum::<Rational>())
                .max()
                .unwrap();
            assert_eq!(upper[a], max);
        }
    }

    #[test]
    fn lower_payoff_cases() {
        let s = space(4);
        let c = RandomVariable::constant(s, r(7)).lower_payoff();
        assert!(s.events().all(|b| *c.get(b) == r(7)));

        let stock = RandomVariable::new(s, vec![r(10), r(10), r(20), r(20)]).unwrap().lower_payoff();
        for b in s.events() {
            let expected = if b & 0b0011 != 0 { r(10) } else { r(20) };
            assert_eq!(*stock.get(b), expected, "event {}", s.label(b));
        }
    }

    #[test]
    fn lower_payoff_from_values_checks_monotonicity() {
        let s = space(2);
        assert!(LowerPayoff::from_values(s, vec![r(0), r(1), r(2), r(1)]).is_ok());
        assert!(LowerPayoff::from_values(s, vec![r(0), r(1), r(2), r(3)]).is_err());
    }

    #[test]
    fn choquet_of_stock_return_under_envelope() {
        let s = space(4);
        let q = four_state_mass().zeta_transform().unwrap();
        let ret = RandomVariable::new(s, vec![r(4), r(2), rat(1, 2), rat(1, 4)]).unwrap();
        assert_eq!(q.choquet(&ret).unwrap(), rat(54, 105));
        assert_eq!(q.choquet_moebius(&ret).unwrap(), rat(54, 105));
    }

    #[test]
    fn choquet_of_probability_is_expectation() {
        let s = space(3);
        let w = [rat(1, 2), rat(1, 3), rat(1, 6)];
        let p = SetFunction::from_probability(s, &w).unwrap();
        let x = RandomVariable::new(s, vec![r(-3), r(5), rat(7, 2)]).unwrap();
        assert_eq!(p.choquet(&x).unwrap(), x.expectation(&w));
    }

    #[test]
    fn choquet_rejects_non_capacity() {
        let s = space(2);
        let bad = SetFunction::new(s, vec![r(0), r(2), r(0), r(1)]).unwrap();
        let x = RandomVariable::constant(s, r(1));
        assert!(matches!(bad.choquet(&x), Err(Error::NotACapacity { .. })));
    }

    #[test]
    fn core_vertex_for_identity_permutation() {
        let q = four_state_mass().zeta_transform().unwrap();
        assert_eq!(q.marginal_vector(&[0, 1, 2, 3]), vec![r(0), rat(15, 105), rat(6, 105), rat(84, 105)]);
        let vertices = q.core_vertex_weights().unwrap();
        assert!(vertices.contains(&vec![r(0), rat(15, 105), rat(6, 105), rat(84, 105)]));
    }

    #[test]
    fn core_of_probability_is_itself() {
        let s = space(3);
        let w = vec![rat(1, 2), rat(1, 3), rat(1, 6)];
        let p = SetFunction::from_probability(s, &w).unwrap();
        assert_eq!(p.core_vertex_weights().unwrap(), vec![w]);
    }

    #[test]
    fn core_vertices_guard_size_and_belief() {
        let big = SetFunction::<Rational>::vacuous_mass(space(11)).zeta_transform().unwrap();
        assert_eq!(big.core_vertices(), Err(Error::TooLarge { n: 11, max: 10 }));
        let s = space(3);
        let phi = SetFunction::from_fn(s, |a| if a.count_ones() >= 2 { r(1) } else { r(0) });
        assert!(matches!(phi.core_vertices(), Err(Error::NotBelief { .. })));
    }

    #[test]
    fn generic_over_floats() {
        let s = space(3);
        let mass = SetFunction::<f64>::from_entries(s, [(0b011, 0.25), (0b110, 0.75)]);
        let bel = mass.zeta_transform().unwrap();
        assert_eq!(bel.classify().unwrap(), CapacityClass::Belief);
        let x = RandomVariable::new(s, vec![1.0, 2.0, 3.0]).unwrap();
        let via_sort = bel.choquet(&x).unwrap();
        let via_mass = bel.choquet_moebius(&x).unwrap();
        assert!((via_sort - via_mass).abs() < 1e-12);
        assert!((via_sort - (0.25 * 1.0 + 0.75 * 2.0)).abs() < 1e-12);
    }

    fn arb_mass(n: usize) -> impl Strategy<Value = SetFunction<Rational>> {
        prop::collection::vec(-20i64..20, (1 << n) - 1).prop_map(move |raw| {
            let s = StateSpace::new(n).unwrap();
            let mut values = vec![r(0)];
            values.extend(raw.into_iter().map(|v| rat(v, 7)));
            SetFunction::new(s, values).unwrap()
        })
    }

    fn arb_rv(n: usize) -> impl Strategy<Value = RandomVariable<Rational>> {
        prop::collection::vec(-30i64..30, n).prop_map(move |raw| {
            RandomVariable::new(StateSpace::new(n).unwrap(), raw.into_iter().map(|v| rat(v, 3)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn zeta_matches_naive_summation(mass in (2usize..=5).prop_flat_map(arb_mass)) {
            let fast = mass.zeta_transform().unwrap();
            prop_assert_eq!(fast.values().to_vec(), naive_zeta(&mass));
        }

        #[test]
        fn moebius_inverts_zeta(mass in (2usize..=5).prop_flat_map(arb_mass)) {
            prop_assert_eq!(mass.zeta_transform().unwrap().moebius_transform().unwrap(), mass);
        }

        #[test]
        fn lower_payoff_matches_naive_min(x in (2usize..=5).prop_flat_map(arb_rv)) {
            let lower = x.lower_payoff();
            for b in x.space().events() {
                let naive = members(b).map(|i| x.get(i).clone()).min().unwrap();
                prop_assert_eq!(lower.get(b), &naive);
            }
        }

        #[test]
        fn dual_is_an_involution(mass in (2usize..=4).prop_flat_map(arb_mass)) {
            let phi = mass.zeta_transform().unwrap();
            prop_assert_eq!(phi.dual().dual(), phi);
        }
    }
}
