//! One-period n-nomial market: a risky asset with gross returns
//! `m₁ > … > mₙ > 0`, a risk-free factor `R = 1+r`, and spot `S₀`.
//!
//! The equivalent martingale measures form a polytope whose vertices are
//! two-point measures `Q_{i,j}`. Its lower envelope `Q̲` is a belief function
//! with a closed form, and so is its Möbius mass.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setfunc::{RandomVariable, SetFunction, StateSpace, Subset};

#[derive(Debug, Clone, PartialEq)]
pub struct MarketModel<T> {
    space: StateSpace,
    m: Vec<T>,
    r_factor: T,
    s0: T,
    p: Option<Vec<T>>,
}

/// Position of `1+r` among the returns: `m_{s−1} > 1+r ≥ m_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitIndex {
    /// 1-based, in `2..=n`.
    pub s: usize,
    /// `1+r = m_s`, in which case `s` joins the upper block.
    pub boundary: bool,
}

impl SplitIndex {
    /// `I = {1, …, s−1}`.
    pub fn upper(&self, space: StateSpace) -> Subset {
        space.range(1, self.s - 1)
    }

    /// `J = {s, …, n}`.
    pub fn lower(&self, space: StateSpace) -> Subset {
        space.range(self.s, space.n())
    }

    /// `I`, or `I ∪ {s}` in the boundary case.
    pub fn effective_upper(&self, space: StateSpace) -> Subset {
        if self.boundary {
            space.range(1, self.s)
        } else {
            self.upper(space)
        }
    }

    /// Size of the first set on the first focal chain.
    fn chain_start(&self) -> usize {
        if self.boundary {
            self.s
        } else {
            self.s - 1
        }
    }
}

/// A vertex `Q_{i,j}` of the closed set of martingale measures.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremePoint<T> {
    /// 1-based upper-block state.
    pub i: usize,
    /// 1-based lower-block state.
    pub j: usize,
    pub weights: Vec<T>,
}

impl<T: Scalar> ExtremePoint<T> {
    pub fn measure(&self, space: StateSpace) -> SetFunction<T> {
        SetFunction::from_probability(space, &self.weights).expect("weights have length n")
    }
}

/// `Q̲ = α·N₁ + (1−α)·N₂` with `N₁`, `N₂` necessity measures.
#[derive(Debug, Clone, PartialEq)]
pub struct NecessityDecomposition<T> {
    pub alpha: T,
    pub n1: SetFunction<T>,
    pub n2: SetFunction<T>,
}

impl<T: Scalar> NecessityDecomposition<T> {
    pub fn recombine(&self) -> SetFunction<T> {
        SetFunction::combine(&self.n1, &self.alpha, &self.n2, &(T::one() - self.alpha.clone()))
    }
}

impl<T: Scalar> MarketModel<T> {
    pub fn new(m: Vec<T>, r_factor: T, s0: T, p: Option<Vec<T>>) -> Result<Self> {
        let space = StateSpace::new(m.len())?;
        if m.iter().any(|v| !v.definitely_positive()) {
            return Err(Error::InvalidModel("returns must be positive".into()));
        }
        if m.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidModel("returns must be strictly decreasing".into()));
        }
        if !r_factor.definitely_positive() {
            return Err(Error::InvalidModel("risk-free factor 1+r must be positive".into()));
        }
        if !s0.definitely_positive() {
            return Err(Error::InvalidModel("spot price must be positive".into()));
        }
        if let Some(p) = &p {
            if p.len() != m.len() {
                return Err(Error::LengthMismatch { expected: m.len(), actual: p.len() });
            }
            if p.iter().any(|v| !v.definitely_positive()) {
                return Err(Error::InvalidModel("real-world probabilities must be positive".into()));
            }
            let total = p.iter().cloned().fold(T::zero(), |a, b| a + b);
            if !total.approx_eq(&T::one()) {
                return Err(Error::InvalidModel("real-world probabilities must sum to 1".into()));
            }
        }
        Ok(Self { space, m, r_factor, s0, p })
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn returns(&self) -> &[T] {
        &self.m
    }

    /// `1+r`.
    pub fn r_factor(&self) -> &T {
        &self.r_factor
    }

    pub fn s0(&self) -> &T {
        &self.s0
    }

    pub fn real_world(&self) -> Option<&[T]> {
        self.p.as_deref()
    }

    /// `m₁ > 1+r > mₙ`.
    pub fn is_viable(&self) -> bool {
        self.m[0] > self.r_factor && self.r_factor > self.m[self.n() - 1]
    }

    /// 1-based return `m_i`.
    pub fn m(&self, i: usize) -> &T {
        &self.m[i - 1]
    }

    /// Terminal price `S₁ = S₀·m`.
    pub fn stock_payoff(&self) -> RandomVariable<T> {
        RandomVariable::new(self.space, self.m.iter().map(|v| v.clone() * self.s0.clone()).collect())
            .expect("length n")
    }

    /// Gross return `S₁/S₀ = m`.
    pub fn return_payoff(&self) -> RandomVariable<T> {
        RandomVariable::new(self.space, self.m.clone()).expect("length n")
    }

    pub fn split_index(&self) -> Result<SplitIndex> {
        let n = self.n();
        if !(self.m[0] > self.r_factor) || self.r_factor < self.m[n - 1] {
            return Err(Error::NotViable);
        }
        if self.r_factor.approx_eq(&self.m[n - 1]) {
            return Err(Error::DegenerateRate);
        }
        let s = (2..=n).find(|&s| *self.m(s) <= self.r_factor || self.m(s).approx_eq(&self.r_factor));
        let s = s.ok_or(Error::NotViable)?;
        Ok(SplitIndex { s, boundary: self.m(s).approx_eq(&self.r_factor) })
    }

    /// Weights of `Q_{i,j}`: `qᵢ = (R − m_j)/(mᵢ − m_j)`, `q_j = (mᵢ − R)/(mᵢ − m_j)`.
    pub fn two_point_weights(&self, i: usize, j: usize) -> Vec<T> {
        let (mi, mj, r) = (self.m(i).clone(), self.m(j).clone(), self.r_factor.clone());
        let span = mi.clone() - mj.clone();
        let mut q = vec![T::zero(); self.n()];
        q[i - 1] = (r.clone() - mj) / span.clone();
        q[j - 1] = (mi - r) / span;
        q
    }

    /// Vertices of `cl(𝒬)`, ordered by `(i, j)`. In the boundary case the
    /// points `Q_{i,s}` all equal the Dirac at `s`; only `Q_{1,s}` is kept.
    pub fn extreme_points(&self) -> Result<Vec<ExtremePoint<T>>> {
        let split = self.split_index()?;
        let n = self.n();
        let mut out: Vec<ExtremePoint<T>> = Vec::new();
        for i in 1..split.s {
            for j in split.s..=n {
                let weights = self.two_point_weights(i, j);
                if !out.iter().any(|p| p.weights.iter().zip(&weights).all(|(a, b)| a.approx_eq(b))) {
                    out.push(ExtremePoint { i, j, weights });
                }
            }
        }
        Ok(out)
    }

    /// Extreme points as probability set functions.
    pub fn extreme_measures(&self) -> Result<Vec<SetFunction<T>>> {
        Ok(self.extreme_points()?.iter().map(|p| p.measure(self.space)).collect())
    }

    fn envelope_split(&self) -> Result<SplitIndex> {
        let split = self.split_index()?;
        if self.n() == 2 {
            return Err(Error::CompleteMarket);
        }
        Ok(split)
    }

    /// `f(j) = (R − m_j)/(m₁ − m_j)`.
    fn f(&self, j: usize) -> T {
        (self.r_factor.clone() - self.m(j).clone()) / (self.m(1).clone() - self.m(j).clone())
    }

    /// `g(i) = (mᵢ − R)/(mᵢ − mₙ)`.
    fn g(&self, i: usize) -> T {
        let mn = self.m(self.n()).clone();
        (self.m(i).clone() - self.r_factor.clone()) / (self.m(i).clone() - mn)
    }

    /// Lower envelope `Q̲` of `cl(𝒬)` in closed form.
    pub fn lower_envelope(&self) -> Result<SetFunction<T>> {
        let split = self.envelope_split()?;
        let space = self.space;
        let upper = split.effective_upper(space);
        let i_block = split.upper(space);
        let j_block = split.lower(space);
        Ok(SetFunction::from_fn(space, |a| {
            if a == space.full() {
                T::one()
            } else if upper & !a == 0 {
                let lowest_missing = (j_block & !a).trailing_zeros() as usize + 1;
                self.f(lowest_missing)
            } else if j_block & !a == 0 {
                let highest_missing = Subset::BITS as usize - (i_block & !a).leading_zeros() as usize;
                self.g(highest_missing)
            } else {
                T::zero()
            }
        }))
    }

    /// Möbius mass of `Q̲` in closed form, supported on the chains
    /// `{1..a} ⊂ … ⊂ {1..n−1}` and `{s..n} ⊂ … ⊂ {2..n}`.
    pub fn envelope_moebius(&self) -> Result<SetFunction<T>> {
        let (first, second) = self.chain_masses()?;
        let mut out = SetFunction::zeros(self.space);
        out = SetFunction::combine(&out, &T::one(), &first, &T::one());
        Ok(SetFunction::combine(&out, &T::one(), &second, &T::one()))
    }

    /// The two chain parts of the envelope mass, unnormalized.
    fn chain_masses(&self) -> Result<(SetFunction<T>, SetFunction<T>)> {
        let split = self.envelope_split()?;
        let space = self.space;
        let n = self.n();
        let a = split.chain_start();
        let first = SetFunction::from_entries(
            space,
            (a..n).map(|k| {
                let v = if k == a { self.f(a + 1) } else { self.f(k + 1) - self.f(k) };
                (space.range(1, k), v)
            }),
        );
        let second = SetFunction::from_entries(
            space,
            (2..=split.s).map(|k| {
                let v = if k == split.s { self.g(k - 1) } else { self.g(k - 1) - self.g(k) };
                (space.range(k, n), v)
            }),
        );
        Ok((first, second))
    }

    /// `α = (R − mₙ)/(m₁ − mₙ)` and the two necessity measures obtained by
    /// normalizing each chain of the envelope mass.
    pub fn necessity_decomposition(&self) -> Result<NecessityDecomposition<T>> {
        let (first, second) = self.chain_masses()?;
        let alpha = self.f(self.n());
        let beta = T::one() - alpha.clone();
        let n1 = first.map(|v| v.clone() / alpha.clone()).zeta_transform()?;
        let n2 = second.map(|v| v.clone() / beta.clone()).zeta_transform()?;
        Ok(NecessityDecomposition { alpha, n1, n2 })
    }

    /// No-arbitrage price bounds `(π_*(X), π^*(X))`: discounted min and max
    /// of `E_Q(X)` over the extreme points.
    pub fn price_interval(&self, x: &RandomVariable<T>) -> Result<(T, T)> {
        if x.space() != self.space {
            return Err(Error::LengthMismatch { expected: self.n(), actual: x.space().n() });
        }
        let points = self.extreme_points()?;
        let values: Vec<T> = points.iter().map(|p| x.expectation(&p.weights) / self.r_factor.clone()).collect();
        let lo = values.iter().cloned().reduce(|a, b| if b < a { b } else { a }).expect("nonempty");
        let hi = values.into_iter().reduce(|a, b| if b > a { b } else { a }).expect("nonempty");
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::setfunc::CapacityClass;

    fn r(v: i64) -> Rational {
        rat(v, 1)
    }

    fn model(m: &[(i64, i64)], rf: Rational) -> MarketModel<Rational> {
        MarketModel::new(m.iter().map(|&(a, b)| rat(a, b)).collect(), rf, r(20), None).unwrap()
    }

    fn four_state() -> MarketModel<Rational> {
        model(&[(4, 1), (2, 1), (1, 2), (1, 4)], r(1))
    }

    fn high_rate() -> MarketModel<Rational> {
        model(&[(5, 1), (3, 1), (2, 1), (1, 2)], r(4))
    }

    fn three_state() -> MarketModel<Rational> {
        model(&[(4, 1), (2, 1), (1, 4)], r(1))
    }

    fn boundary() -> MarketModel<Rational> {
        model(&[(3, 1), (2, 1), (1, 1)], r(2))
    }

    fn pointwise_min(model: &MarketModel<Rational>) -> SetFunction<Rational> {
        let points = model.extreme_measures().unwrap();
        SetFunction::from_fn(model.space(), |a| points.iter().map(|q| q[a].clone()).min().unwrap())
    }

    #[test]
    fn model_validation() {
        assert!(MarketModel::new(vec![r(2), r(2)], r(1), r(1), None).is_err());
        assert!(MarketModel::new(vec![r(2), r(-1)], r(1), r(1), None).is_err());
        assert!(MarketModel::new(vec![r(2), r(1)], r(0), r(1), None).is_err());
        assert!(MarketModel::new(vec![r(2), r(1)], r(1), r(0), None).is_err());
        assert!(MarketModel::new(vec![r(2), r(1)], r(1), r(1), Some(vec![rat(1, 2), rat(1, 3)])).is_err());
        assert!(MarketModel::new(vec![r(2), r(1)], r(1), r(1), Some(vec![rat(1, 2), rat(1, 2)])).is_ok());
    }

    #[test]
    fn split_index_cases() {
        assert_eq!(four_state().split_index().unwrap(), SplitIndex { s: 3, boundary: false });
        assert_eq!(high_rate().split_index().unwrap(), SplitIndex { s: 2, boundary: false });
        assert_eq!(boundary().split_index().unwrap(), SplitIndex { s: 2, boundary: true });
        let s = four_state().space();
        assert_eq!(four_state().split_index().unwrap().upper(s), 0b0011);
        assert_eq!(four_state().split_index().unwrap().lower(s), 0b1100);
    }

    #[test]
    fn split_index_errors() {
        assert_eq!(model(&[(3, 1), (2, 1), (1, 1)], r(1)).split_index(), Err(Error::DegenerateRate));
        assert_eq!(model(&[(3, 1), (2, 1), (1, 1)], r(3)).split_index(), Err(Error::NotViable));
        assert_eq!(model(&[(3, 1), (2, 1), (1, 1)], r(5)).split_index(), Err(Error::NotViable));
        assert_eq!(model(&[(3, 1), (2, 1), (1, 1)], rat(1, 2)).split_index(), Err(Error::NotViable));
    }

    #[test]
    fn extreme_points_of_four_state() {
        let points = four_state().extreme_points().unwrap();
        let pairs: Vec<(usize, usize)> = points.iter().map(|p| (p.i, p.j)).collect();
        assert_eq!(pairs, [(1, 3), (1, 4), (2, 3), (2, 4)]);
        assert_eq!(points[0].weights, [rat(15, 105), r(0), rat(90, 105), r(0)]);
        assert_eq!(points[1].weights, [rat(21, 105), r(0), r(0), rat(84, 105)]);
        assert_eq!(points[2].weights, [r(0), rat(35, 105), rat(70, 105), r(0)]);
        assert_eq!(points[3].weights, [r(0), rat(45, 105), r(0), rat(60, 105)]);
        let m = four_state();
        for p in &points {
            assert_eq!(p.weights.iter().cloned().sum::<Rational>(), r(1));
            assert_eq!(m.return_payoff().expectation(&p.weights), r(1));
        }
    }

    #[test]
    fn extreme_points_of_three_state_market() {
        let points = three_state().extreme_points().unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].weights, [rat(21, 105), r(0), rat(84, 105)]);
        assert_eq!(points[1].weights, [r(0), rat(45, 105), rat(60, 105)]);
    }

    #[test]
    fn complete_market_has_single_point() {
        let m = model(&[(3, 1), (1, 2)], r(1));
        let points = m.extreme_points().unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].weights, [rat(1, 5), rat(4, 5)]);
        assert_eq!(m.lower_envelope(), Err(Error::CompleteMarket));
    }

    #[test]
    fn boundary_extreme_points_are_deduplicated() {
        let points = boundary().extreme_points().unwrap();
        let weights: Vec<Vec<Rational>> = points.iter().map(|p| p.weights.clone()).collect();
        assert_eq!(weights, [vec![r(0), r(1), r(0)], vec![rat(1, 2), r(0), rat(1, 2)]]);
    }

    #[test]
    fn envelope_of_four_state() {
        let m = four_state();
        let s = m.space();
        let q = m.lower_envelope().unwrap();
        let expected = [
            (0b0000, r(0)),
            (0b0001, r(0)),
            (0b0010, r(0)),
            (0b0100, r(0)),
            (0b1000, r(0)),
            (0b0011, rat(15, 105)),
            (0b0101, r(0)),
            (0b1001, r(0)),
            (0b0110, r(0)),
            (0b1010, r(0)),
            (0b1100, rat(60, 105)),
            (0b0111, rat(21, 105)),
            (0b1011, rat(15, 105)),
            (0b1101, rat(60, 105)),
            (0b1110, rat(84, 105)),
            (0b1111, r(1)),
        ];
        for (a, v) in expected {
            assert_eq!(q[a], v, "Q̲({})", s.compact_label(a));
        }
        assert_eq!(q, pointwise_min(&m));
    }

    #[test]
    fn envelope_of_high_rate() {
        let m = high_rate();
        let q = m.lower_envelope().unwrap();
        assert_eq!(q[0b0001], rat(9, 18));
        assert_eq!(q[0b0011], rat(12, 18));
        assert_eq!(q[0b0111], rat(14, 18));
        assert_eq!(q[0b1110], rat(4, 18));
        assert_eq!(q, pointwise_min(&m));
    }

    #[test]
    fn envelope_of_boundary_model() {
        let m = boundary();
        assert_eq!(m.lower_envelope().unwrap(), pointwise_min(&m));
    }

    #[test]
    fn envelope_mass_closed_forms() {
        let m = four_state();
        let mu = m.envelope_moebius().unwrap();
        let expected = SetFunction::from_entries(
            m.space(),
            [(0b0011, rat(15, 105)), (0b1100, rat(60, 105)), (0b0111, rat(6, 105)), (0b1110, rat(24, 105))],
        );
        assert_eq!(mu, expected);
        assert_eq!(mu, m.lower_envelope().unwrap().moebius_transform().unwrap());

        let m9 = high_rate();
        let mu9 = m9.envelope_moebius().unwrap();
        let expected9 = SetFunction::from_entries(
            m9.space(),
            [(0b0001, rat(9, 18)), (0b0011, rat(3, 18)), (0b0111, rat(2, 18)), (0b1110, rat(4, 18))],
        );
        assert_eq!(mu9, expected9);

        let b = boundary();
        assert_eq!(b.envelope_moebius().unwrap(), b.lower_envelope().unwrap().moebius_transform().unwrap());
    }

    #[test]
    fn necessity_decomposition_of_four_state() {
        let m = four_state();
        let d = m.necessity_decomposition().unwrap();
        assert_eq!(d.alpha, rat(21, 105));
        assert_eq!(d.n1[0b0011], rat(15, 21));
        assert_eq!(d.n2[0b1100], rat(60, 84));
        assert_eq!(d.n1.classify().unwrap(), CapacityClass::Necessity);
        assert_eq!(d.n2.classify().unwrap(), CapacityClass::Necessity);
        assert_eq!(d.recombine(), m.lower_envelope().unwrap());
    }

    #[test]
    fn necessity_decomposition_recombines() {
        for m in [high_rate(), boundary(), three_state()] {
            let d = m.necessity_decomposition().unwrap();
            assert_eq!(d.recombine(), m.lower_envelope().unwrap());
            assert_eq!(d.n1.classify().unwrap(), CapacityClass::Necessity);
            assert_eq!(d.n2.classify().unwrap(), CapacityClass::Necessity);
        }
    }

    #[test]
    fn price_intervals_of_three_state_market() {
        let m = three_state();
        let s = m.space();
        let x = RandomVariable::new(s, vec![r(20), r(10), r(10)]).unwrap();
        let y = RandomVariable::new(s, vec![r(10), r(10), r(20)]).unwrap();
        assert_eq!(m.price_interval(&x).unwrap(), (r(10), r(12)));
        assert_eq!(m.price_interval(&y).unwrap(), (rat(110, 7), r(18)));
        assert_eq!(m.price_interval(&m.stock_payoff()).unwrap(), (r(20), r(20)));
    }

    #[test]
    fn envelope_is_a_belief_function() {
        let q = four_state().lower_envelope().unwrap();
        assert_eq!(q.classify().unwrap(), CapacityClass::Belief);
    }

    #[test]
    fn floating_point_envelope() {
        let m = MarketModel::<f64>::new(vec![4.0, 2.0, 0.5, 0.25], 1.0, 20.0, None).unwrap();
        let q = m.lower_envelope().unwrap();
        assert!((q[0b0111] - 0.2).abs() < 1e-12);
        assert!((q[0b1110] - 0.8).abs() < 1e-12);
    }
}
