//! Inner approximation of the martingale-measure envelope `Q̲` by a belief
//! function that is itself a martingale under the Choquet integral, and
//! ε-contamination to make it equivalent.
//!
//! Unknowns are the Möbius masses `μ_B`, `B ≠ ∅`, with constraints
//!
//! ```text
//! Σ_{B⊆A} μ_B ≥ Q̲(A)                 for A ≠ ∅
//! Σ_B m_{max B} μ_B = 1+r              (lower payoff of the return)
//! Σ_B m_{min B} μ_B = 1+r              (strong variant only)
//! Σ_B μ_B = 1,  μ ≥ 0
//! ```
//!
//! where `max B` / `min B` are the largest / smallest state index in `B`.
//! `d1` is linear in `μ` and is solved exactly; `d2` is a strictly convex
//! quadratic, solved in `f64`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::market::MarketModel;
use crate::scalar::Scalar;
use crate::setfunc::{is_subset, members, CapacityClass, SetFunction, StateSpace, Subset};
use crate::solver::{is_unique_optimum, solve_linear, lp_solve, qp_solve, LinearProgram, LpOutcome, QpOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxKind {
    Martingale,
    StrongMartingale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    /// `Σ_A |Bel(A) − Q̲(A)|`.
    D1,
    /// `Σ_A (Bel(A) − Q̲(A))²`, not square-rooted.
    D2,
}

/// Tolerance of the `d2` solver (KKT residual and Frank–Wolfe gap).
pub const D2_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxProblem<T> {
    model: MarketModel<T>,
    kind: ApproxKind,
    distance: Distance,
    envelope: SetFunction<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceValue<T> {
    Exact(T),
    Approximate(f64),
}

impl<T: Scalar> DistanceValue<T> {
    pub fn to_f64(&self) -> f64 {
        match self {
            DistanceValue::Exact(v) => v.to_f64_lossy(),
            DistanceValue::Approximate(v) => *v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult<T> {
    pub kind: ApproxKind,
    pub distance: Distance,
    /// Optimal Möbius mass. For `d2` this is the exact KKT point when one
    /// was found, and the floating solution on a dyadic grid otherwise.
    pub mass: SetFunction<T>,
    pub belief: SetFunction<T>,
    pub value: DistanceValue<T>,
    pub unique: bool,
    /// No other feasible `Bel′` satisfies `Q̲ ≤ Bel′ ≤ Bel`.
    pub dominance_minimal: bool,
    /// `mass` satisfies the optimality conditions exactly in `T`.
    pub exact_optimum: bool,
    /// `d2` only: KKT residual at the returned point.
    pub kkt_residual: Option<f64>,
    /// `d2` only: Frank–Wolfe gap at the returned point.
    pub frank_wolfe_gap: Option<f64>,
}

fn var(b: Subset) -> usize {
    b as usize - 1
}

fn highest_state(b: Subset) -> usize {
    (Subset::BITS - b.leading_zeros()) as usize
}

fn lowest_state(b: Subset) -> usize {
    b.trailing_zeros() as usize + 1
}

impl<T: Scalar> ApproxProblem<T> {
    pub fn new(model: MarketModel<T>, kind: ApproxKind, distance: Distance) -> Result<Self> {
        let envelope = model.lower_envelope()?;
        Ok(Self { model, kind, distance, envelope })
    }

    pub fn model(&self) -> &MarketModel<T> {
        &self.model
    }

    pub fn kind(&self) -> ApproxKind {
        self.kind
    }

    pub fn distance(&self) -> Distance {
        self.distance
    }

    pub fn envelope(&self) -> &SetFunction<T> {
        &self.envelope
    }

    pub fn space(&self) -> StateSpace {
        self.model.space()
    }

    fn num_vars(&self) -> usize {
        self.space().size() - 1
    }

    fn return_row(&self, pick: fn(Subset) -> usize) -> Vec<T> {
        self.space().events().map(|b| self.model.m(pick(b)).clone()).collect()
    }

    /// The feasible region, with a zero objective. The strong variant's
    /// second return row is stated as its difference with the first, which
    /// has zero right-hand side.
    pub fn constraints(&self) -> LinearProgram<T> {
        let space = self.space();
        let mut lp = LinearProgram::new(self.num_vars());
        for a in space.events() {
            if a == space.full() || !self.envelope[a].definitely_positive() {
                continue;
            }
            let row = lp.sparse_row(space.events().filter(|&b| is_subset(b, a)).map(|b| (var(b), T::one())));
            lp.add_ge(row, self.envelope[a].clone());
        }
        lp.add_eq(self.return_row(highest_state), self.model.r_factor().clone());
        if self.kind == ApproxKind::StrongMartingale {
            let spread = self.space().events().map(|b| self.model.m(lowest_state(b)).clone() - self.model.m(highest_state(b)).clone());
            lp.add_eq(spread.collect(), T::zero());
        }
        lp.add_eq(vec![T::one(); self.num_vars()], T::one());
        lp
    }

    /// Weights `2^{n−|B|}`: `Σ_{A≠∅} Bel(A) = Σ_B 2^{n−|B|} μ_B`.
    fn belief_sum_weights(&self) -> Vec<T> {
        let n = self.space().n() as u32;
        self.space().events().map(|b| T::pow2(n - b.count_ones())).collect()
    }

    fn envelope_sum(&self) -> T {
        self.envelope.total()
    }

    pub fn mass_vector(&self, mass: &SetFunction<T>) -> Vec<T> {
        self.space().events().map(|b| mass[b].clone()).collect()
    }

    pub fn mass_from_vector(&self, x: &[T]) -> SetFunction<T> {
        let space = self.space();
        SetFunction::from_entries(space, space.events().map(|b| (b, x[var(b)].clone())))
    }

    /// Exact membership in the feasible region.
    pub fn is_feasible(&self, mass: &SetFunction<T>) -> bool {
        mass.space() == self.space() && mass[0].approx_zero() && self.constraints().is_feasible(&self.mass_vector(mass))
    }

    pub fn d1_distance(&self, belief: &SetFunction<T>) -> T {
        belief
            .values()
            .iter()
            .zip(self.envelope.values())
            .fold(T::zero(), |acc, (b, q)| acc + (b.clone() - q.clone()).abs())
    }

    pub fn d2_distance(&self, belief: &SetFunction<T>) -> T {
        belief.values().iter().zip(self.envelope.values()).fold(T::zero(), |acc, (b, q)| {
            let d = b.clone() - q.clone();
            acc + d.clone() * d
        })
    }

    /// `Σ_{|B|≥2} (m_{min B} − m_{max B}) μ_B`: the difference of the two
    /// return rows, which vanishes for every strong-feasible mass.
    pub fn strong_gap(&self, mass: &SetFunction<T>) -> T {
        self.space()
            .events()
            .filter(|b| b.count_ones() >= 2)
            .fold(T::zero(), |acc, b| {
                let spread = self.model.m(lowest_state(b)).clone() - self.model.m(highest_state(b)).clone();
                acc + spread * mass[b].clone()
            })
    }

    /// `2^{n−1} − Σ_A Q̲(A)`, the `d1` value of every probability in `cl(𝒬)`.
    pub fn strong_d1_value(&self) -> T {
        T::pow2(self.space().n() as u32 - 1) - self.envelope_sum()
    }

    /// Masses of the extreme points of `cl(𝒬)`; each is feasible for both
    /// problem kinds.
    pub fn extreme_masses(&self) -> Result<Vec<SetFunction<T>>> {
        let space = self.space();
        Ok(self
            .model
            .extreme_points()?
            .into_iter()
            .map(|p| SetFunction::from_entries(space, (0..space.n()).map(|i| (1 << i, p.weights[i].clone()))))
            .collect())
    }

    /// The same problem in `f64`.
    pub fn to_f64(&self) -> ApproxProblem<f64> {
        let lossy = |v: &[T]| v.iter().map(Scalar::to_f64_lossy).collect::<Vec<_>>();
        ApproxProblem {
            model: MarketModel::new(
                lossy(self.model.returns()),
                self.model.r_factor().to_f64_lossy(),
                self.model.s0().to_f64_lossy(),
                self.model.real_world().map(lossy),
            )
            .expect("validated in the source type"),
            kind: self.kind,
            distance: self.distance,
            envelope: to_f64_set(&self.envelope),
        }
    }

    /// Searches for a feasible `Bel′ ≤ Bel`, `Bel′ ≠ Bel`, by maximizing
    /// `Σ_A (Bel(A) − Bel′(A))`. Returns that maximum (zero iff minimal).
    pub fn dominance_slack(&self, belief: &SetFunction<T>, rhs_tolerance: &T) -> Result<T> {
        let space = self.space();
        let mut lp = self.constraints();
        for a in space.events().filter(|&a| a != space.full()) {
            let row = lp.sparse_row(space.events().filter(|&b| is_subset(b, a)).map(|b| (var(b), T::one())));
            lp.add_le(row, belief[a].clone() + rhs_tolerance.clone());
        }
        lp.set_objective(self.belief_sum_weights());
        match lp_solve(&lp)? {
            LpOutcome::Optimal { objective, .. } => {
                let own: T = space.events().map(|a| belief[a].clone()).fold(T::zero(), |x, y| x + y);
                Ok(own - objective)
            }
            _ => Err(Error::Infeasible),
        }
    }
}

/// Solves the approximation problem for either kind and distance.
pub fn solve_inner<T: Scalar>(problem: &ApproxProblem<T>) -> Result<ApproxResult<T>> {
    match problem.distance {
        Distance::D1 => solve_d1(problem),
        Distance::D2 => solve_d2(problem, None),
    }
}

/// The strong variant; additionally asserts that the optimum is a
/// probability (mass on singletons only).
pub fn solve_strong<T: Scalar>(problem: &ApproxProblem<T>) -> Result<ApproxResult<T>> {
    if problem.kind != ApproxKind::StrongMartingale {
        return Err(Error::InvalidModel("strong solver called on a martingale problem".into()));
    }
    let result = solve_inner(problem)?;
    let off_singletons = problem.space().events().filter(|b| b.count_ones() >= 2).any(|b| result.mass[b].definitely_positive());
    if off_singletons {
        return Err(Error::CertificateRejected("strong optimum carries mass off the singletons".into()));
    }
    Ok(result)
}

fn solve_d1<T: Scalar>(problem: &ApproxProblem<T>) -> Result<ApproxResult<T>> {
    let mut lp = problem.constraints();
    lp.set_objective(problem.belief_sum_weights());
    let LpOutcome::Optimal { primal, objective, .. } = lp_solve(&lp)? else {
        return Err(Error::Infeasible);
    };
    let unique = is_unique_optimum(&lp, &primal)?;
    let mass = problem.mass_from_vector(&primal);
    let belief = mass.zeta_transform()?;
    let value = objective - problem.envelope_sum();
    let dominance_minimal = !problem.dominance_slack(&belief, &T::zero())?.definitely_positive();
    Ok(ApproxResult {
        kind: problem.kind,
        distance: Distance::D1,
        mass,
        belief,
        value: DistanceValue::Exact(value),
        unique,
        dominance_minimal,
        exact_optimum: T::is_exact(),
        kkt_residual: None,
        frank_wolfe_gap: None,
    })
}

struct D2Data {
    hessian: DMatrix<f64>,
    linear: Vec<f64>,
    constraints: LinearProgram<f64>,
}

fn d2_data<T: Scalar>(problem: &ApproxProblem<T>) -> D2Data {
    let space = problem.space();
    let n = space.n() as i32;
    let events: Vec<Subset> = space.events().collect();
    let k = events.len();
    let mut hessian = DMatrix::zeros(k, k);
    for (i, &b) in events.iter().enumerate() {
        for (j, &c) in events.iter().enumerate() {
            hessian[(i, j)] = 2.0 * 2f64.powi(n - (b | c).count_ones() as i32);
        }
    }
    let q: Vec<f64> = problem.envelope.values().iter().map(Scalar::to_f64_lossy).collect();
    let linear = events
        .iter()
        .map(|&b| -2.0 * events.iter().filter(|&&a| is_subset(b, a)).map(|&a| q[a as usize]).sum::<f64>())
        .collect();
    D2Data { hessian, linear, constraints: problem.constraints().map(Scalar::to_f64_lossy) }
}

fn d2_gradient(data: &D2Data, x: &[f64]) -> Vec<f64> {
    let hx = &data.hessian * nalgebra::DVector::from_column_slice(x);
    hx.iter().zip(&data.linear).map(|(a, b)| a + b).collect()
}

/// Spacing of the dyadic grid that `d2` solutions are rounded to before
/// the certifying LPs run in the problem's own scalar type.
const GRID: f64 = 1.0 / (1u64 << 40) as f64;

fn on_grid<T: Scalar>(v: f64) -> T {
    T::from_f64((v / GRID).round() * GRID).expect("finite")
}

/// `d2` from a given feasible start, or by the dual active-set method.
pub fn solve_d2<T: Scalar>(problem: &ApproxProblem<T>, start: Option<&SetFunction<T>>) -> Result<ApproxResult<T>> {
    let data = d2_data(problem);
    let x0: Option<Vec<f64>> = start.map(|s| problem.mass_vector(s).iter().map(Scalar::to_f64_lossy).collect());
    let options = QpOptions { tol: D2_TOLERANCE, max_iterations: None };
    let sol = qp_solve(&data.hessian, &data.linear, &data.constraints, options, x0.as_deref())?;
    let exact = exact_kkt_point(problem, &sol.x)?;
    let exact_optimum = exact.is_some();
    let (x, gradient): (Vec<T>, Vec<T>) = match exact {
        Some(x) => {
            let events: Vec<Subset> = problem.space().events().collect();
            let gradient = d2_gradient_exact(&events, &d2_linear_exact(problem), &x);
            (x, gradient)
        }
        None => {
            let x: Vec<T> = sol.x.iter().map(|&v| on_grid(v)).collect();
            let x_f64: Vec<f64> = x.iter().map(Scalar::to_f64_lossy).collect();
            (x, d2_gradient(&data, &x_f64).into_iter().map(on_grid).collect())
        }
    };
    let gap = linear_gap(problem, &gradient, &x)?;

    let mass = problem.mass_from_vector(&x);
    let belief = mass.zeta_transform()?;
    let value: f64 = belief
        .values()
        .iter()
        .zip(problem.envelope.values())
        .map(|(b, q)| (b.to_f64_lossy() - q.to_f64_lossy()).powi(2))
        .sum();
    let dominance_minimal = if exact_optimum {
        !problem.dominance_slack(&belief, &T::zero())?.definitely_positive()
    } else {
        problem.dominance_slack(&belief, &on_grid(1e-9))?.to_f64_lossy() <= 1e-6
    };
    Ok(ApproxResult {
        kind: problem.kind,
        distance: Distance::D2,
        mass,
        belief,
        value: DistanceValue::Approximate(value),
        unique: true,
        dominance_minimal,
        exact_optimum,
        kkt_residual: Some(sol.kkt_residual),
        frank_wolfe_gap: Some(gap),
    })
}

/// `½μᵀHμ + cᵀμ` is `d2` up to a constant: `H_{BC} = 2·2^{n−|B∪C|}`,
/// `c_B = −2 Σ_{A⊇B} Q̲(A)`.
fn d2_hessian_entry<T: Scalar>(n: usize, b: Subset, c: Subset) -> T {
    T::pow2(n as u32 + 1 - (b | c).count_ones())
}

fn d2_linear_exact<T: Scalar>(problem: &ApproxProblem<T>) -> Vec<T> {
    let space = problem.space();
    space
        .events()
        .map(|b| {
            let up = space.events().filter(|&a| is_subset(b, a)).fold(T::zero(), |acc, a| acc + problem.envelope[a].clone());
            -(T::one() + T::one()) * up
        })
        .collect()
}

/// `Hμ + c` in `T`; `events` lists every nonempty event, so its length is
/// `2^n − 1`.
fn d2_gradient_exact<T: Scalar>(events: &[Subset], linear: &[T], point: &[T]) -> Vec<T> {
    let n = events.len().trailing_ones() as usize;
    let support: Vec<usize> = (0..point.len()).filter(|&k| !point[k].approx_zero()).collect();
    (0..point.len())
        .map(|j| support.iter().fold(linear[j].clone(), |acc, &k| acc + d2_hessian_entry::<T>(n, events[j], events[k]) * point[k].clone()))
        .collect()
}

/// Tries to turn the floating `d2` solution into an exact one: the support
/// and active rows read off `x` define a linear KKT system, solved in `T`;
/// the point is kept when it is feasible and an LP finds multipliers of the
/// right signs for the rows tight there.
fn exact_kkt_point<T: Scalar>(problem: &ApproxProblem<T>, x: &[f64]) -> Result<Option<Vec<T>>> {
    let lp = problem.constraints();
    let n = problem.space().n();
    let events: Vec<Subset> = problem.space().events().collect();
    let linear = d2_linear_exact(problem);
    let dot_f64 = |row: &[T]| row.iter().zip(x).map(|(a, v)| a.to_f64_lossy() * v).sum::<f64>();
    for threshold in [1e-9, 1e-7, 1e-11] {
        let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] > threshold).collect();
        let mut rows: Vec<(&[T], T)> = lp.eq_rows().iter().map(|r| (r.coeffs.as_slice(), r.rhs.clone())).collect();
        for r in lp.le_rows() {
            let rhs = r.rhs.to_f64_lossy();
            if (dot_f64(&r.coeffs) - rhs).abs() <= threshold * (1.0 + rhs.abs()) {
                rows.push((r.coeffs.as_slice(), r.rhs.clone()));
            }
        }
        let s = support.len();
        let size = s + rows.len();
        let mut a = vec![vec![T::zero(); size]; size];
        let mut b = vec![T::zero(); size];
        for (i, &j) in support.iter().enumerate() {
            for (k, &l) in support.iter().enumerate() {
                a[i][k] = d2_hessian_entry(n, events[j], events[l]);
            }
            for (r, (coeffs, _)) in rows.iter().enumerate() {
                a[i][s + r] = coeffs[j].clone();
            }
            b[i] = -linear[j].clone();
        }
        for (r, (coeffs, rhs)) in rows.iter().enumerate() {
            for (k, &l) in support.iter().enumerate() {
                a[s + r][k] = coeffs[l].clone();
            }
            b[s + r] = rhs.clone();
        }
        let Some(sol) = solve_linear(a, b) else { continue };
        let mut point = vec![T::zero(); x.len()];
        for (k, &l) in support.iter().enumerate() {
            point[l] = sol[k].clone();
        }
        if lp.is_feasible(&point) && has_kkt_multipliers(&lp, &events, &linear, &point)? {
            return Ok(Some(point));
        }
    }
    Ok(None)
}

/// Whether `g + Σ λ_r a_r ≥ 0` (with equality on the support) has a
/// solution with `λ_r ≥ 0` on the `≤` rows tight at `point`.
fn has_kkt_multipliers<T: Scalar>(lp: &LinearProgram<T>, events: &[Subset], linear: &[T], point: &[T]) -> Result<bool> {
    let gradient = d2_gradient_exact(events, linear, point);
    let mut rows: Vec<&[T]> = lp.eq_rows().iter().map(|r| r.coeffs.as_slice()).collect();
    let num_eq = rows.len();
    for r in lp.le_rows() {
        let at: T = r.coeffs.iter().zip(point).fold(T::zero(), |acc, (a, v)| acc + a.clone() * v.clone());
        if (at - r.rhs.clone()).approx_zero() {
            rows.push(r.coeffs.as_slice());
        }
    }
    let mut dual = LinearProgram::new(rows.len());
    for r in 0..num_eq {
        dual.set_free(r);
    }
    for j in 0..point.len() {
        let coeffs: Vec<T> = rows.iter().map(|row| row[j].clone()).collect();
        if point[j].approx_zero() {
            dual.add_ge(coeffs, -gradient[j].clone());
        } else {
            dual.add_eq(coeffs, -gradient[j].clone());
        }
    }
    Ok(!lp_solve(&dual)?.is_infeasible())
}

/// Frank–Wolfe gap `gᵀx − min_{y feasible} gᵀy`, solved in `T`.
fn linear_gap<T: Scalar>(problem: &ApproxProblem<T>, gradient: &[T], x: &[T]) -> Result<f64> {
    let mut lp = problem.constraints();
    lp.set_objective(gradient.to_vec());
    match lp_solve(&lp)? {
        LpOutcome::Optimal { objective, .. } => {
            let at_x = gradient.iter().zip(x).fold(T::zero(), |acc, (g, v)| acc + g.clone() * v.clone());
            Ok((at_x - objective).to_f64_lossy())
        }
        _ => Err(Error::Infeasible),
    }
}

fn to_f64_set<T: Scalar>(f: &SetFunction<T>) -> SetFunction<f64> {
    SetFunction::from_fn(f.space(), |a| f[a].to_f64_lossy())
}

/// Random feasible masses: convex combinations of the extreme-point masses
/// with uniform random weights.
pub fn random_feasible_starts<T: Scalar>(problem: &ApproxProblem<T>, count: usize, seed: u64) -> Result<Vec<SetFunction<T>>> {
    let vertices = problem.extreme_masses()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let raw: Vec<u32> = (0..vertices.len()).map(|_| rng.random_range(1..=1000)).collect();
        let total: u32 = raw.iter().sum();
        let mut mass = SetFunction::zeros(problem.space());
        for (v, &w) in vertices.iter().zip(&raw) {
            let weight = T::from_u32(w).expect("small") / T::from_u32(total).expect("small");
            mass = SetFunction::combine(&mass, &T::one(), v, &weight);
        }
        out.push(mass);
    }
    Ok(out)
}

/// Re-solves `d2` from `count` random feasible starts and returns the
/// largest deviation of the optimal mass from `reference`.
pub fn d2_multistart_spread<T: Scalar>(problem: &ApproxProblem<T>, reference: &ApproxResult<T>, count: usize, seed: u64) -> Result<f64> {
    let data = d2_data(problem);
    let options = QpOptions { tol: D2_TOLERANCE, max_iterations: None };
    let reference: Vec<f64> = problem.mass_vector(&reference.mass).iter().map(Scalar::to_f64_lossy).collect();
    let mut worst: f64 = 0.0;
    for start in random_feasible_starts(problem, count, seed)? {
        let x0: Vec<f64> = problem.mass_vector(&start).iter().map(Scalar::to_f64_lossy).collect();
        let other = qp_solve(&data.hessian, &data.linear, &data.constraints, options, Some(&x0))?;
        for (a, b) in other.x.iter().zip(&reference) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// `(1 − ε)·Q₀ + ε·Bel`.
pub fn epsilon_contaminate<T: Scalar>(q0: &SetFunction<T>, bel: &SetFunction<T>, eps: &T) -> Result<SetFunction<T>> {
    if !(eps.definitely_positive() && (T::one() - eps.clone()).definitely_positive()) {
        return Err(Error::EpsOutOfRange);
    }
    if q0.space() != bel.space() {
        return Err(Error::LengthMismatch { expected: q0.space().n(), actual: bel.space().n() });
    }
    if q0.classify()? != CapacityClass::Probability {
        return Err(Error::NotAProbability);
    }
    check_equivalent(q0)?;
    bel.check_belief()?;
    Ok(SetFunction::combine(q0, &(T::one() - eps.clone()), bel, eps))
}

fn check_equivalent<T: Scalar>(q: &SetFunction<T>) -> Result<()> {
    match (0..q.space().n()).find(|&i| !q[1 << i].definitely_positive()) {
        Some(i) => Err(Error::NotEquivalent { state: i + 1 }),
        None => Ok(()),
    }
}

/// Uniform average of the extreme points of `cl(𝒬)`.
pub fn default_q0<T: Scalar>(model: &MarketModel<T>) -> Result<SetFunction<T>> {
    model.lower_envelope()?;
    let points = model.extreme_points()?;
    let k = <T as Scalar>::from_usize(points.len());
    let n = model.n();
    let weights: Vec<T> = (0..n)
        .map(|i| points.iter().map(|p| p.weights[i].clone()).fold(T::zero(), |a, b| a + b) / k.clone())
        .collect();
    let q0 = SetFunction::from_probability(model.space(), &weights)?;
    check_equivalent(&q0)?;
    Ok(q0)
}

/// State indices `i` (1-based) with their members, for diagnostics.
pub fn describe_support<T: Scalar>(mass: &SetFunction<T>) -> Vec<Vec<usize>> {
    mass.support().into_iter().map(|b| members(b).map(|i| i + 1).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn r(v: i64) -> Rational {
        rat(v, 1)
    }

    fn four_state() -> MarketModel<Rational> {
        MarketModel::new(vec![r(4), r(2), rat(1, 2), rat(1, 4)], r(1), r(20), None).unwrap()
    }

    fn high_rate() -> MarketModel<Rational> {
        MarketModel::new(vec![r(5), r(3), r(2), rat(1, 2)], r(4), r(20), None).unwrap()
    }

    fn mass(space: StateSpace, entries: &[(Subset, Rational)]) -> SetFunction<Rational> {
        SetFunction::from_entries(space, entries.iter().cloned())
    }

    #[test]
    fn d1_martingale_value_on_four_state() {
        let p = ApproxProblem::new(four_state(), ApproxKind::Martingale, Distance::D1).unwrap();
        let res = solve_inner(&p).unwrap();
        assert_eq!(res.value, DistanceValue::Exact(rat(96, 105)));
        assert!(p.is_feasible(&res.mass));
        assert!(res.dominance_minimal);
        let s = p.space();
        let reference = mass(s, &[(0b0001, rat(21, 105)), (0b1100, rat(60, 105)), (0b1110, rat(24, 105))]);
        assert!(p.is_feasible(&reference));
        assert_eq!(p.d1_distance(&reference.zeta_transform().unwrap()), rat(96, 105));
    }

    #[test]
    fn d1_martingale_is_not_unique_on_high_rate() {
        let p = ApproxProblem::new(high_rate(), ApproxKind::Martingale, Distance::D1).unwrap();
        let res = solve_inner(&p).unwrap();
        assert_eq!(res.value, DistanceValue::Exact(rat(20, 18)));
        assert!(!res.unique);
        let s = p.space();
        let mu1 = mass(s, &[(0b0001, rat(12, 18)), (0b0110, rat(4, 18)), (0b0111, rat(2, 18))]);
        let mu2 = mass(s, &[(0b0001, rat(11, 18)), (0b0011, rat(3, 18)), (0b0110, rat(4, 18))]);
        for m in [mu1, mu2] {
            assert!(p.is_feasible(&m));
            assert_eq!(p.d1_distance(&m.zeta_transform().unwrap()), rat(20, 18));
        }
    }

    #[test]
    fn strong_d1_on_high_rate() {
        let p = ApproxProblem::new(high_rate(), ApproxKind::StrongMartingale, Distance::D1).unwrap();
        let res = solve_strong(&p).unwrap();
        assert_eq!(res.value, DistanceValue::Exact(rat(8, 3)));
        assert_eq!(p.strong_d1_value(), rat(8, 3));
        assert!(!res.unique);
        assert_eq!(p.strong_gap(&res.mass), r(0));
    }

    #[test]
    fn d2_martingale_on_high_rate() {
        let p = ApproxProblem::new(high_rate(), ApproxKind::Martingale, Distance::D2).unwrap();
        let res = solve_inner(&p).unwrap();
        let expected = [(0b0001, 0.628655), (0b0010, 0.0087719), (0b0011, 0.149123), (0b0110, 0.18421), (0b1110, 0.0292399)];
        for (b, v) in expected {
            assert!((res.mass[b].to_f64_lossy() - v).abs() < 1e-4, "μ({b:b})");
        }
        assert!((res.value.to_f64() - 0.169591).abs() < 1e-4);
        assert!(res.unique && res.dominance_minimal);
        assert!(res.kkt_residual.unwrap() <= D2_TOLERANCE);
        assert!(res.frank_wolfe_gap.unwrap() <= 1e-8);
    }

    #[test]
    fn d2_strong_on_high_rate() {
        let p = ApproxProblem::new(high_rate(), ApproxKind::StrongMartingale, Distance::D2).unwrap();
        let res = solve_strong(&p).unwrap();
        let expected = [0.638889, 0.188596, 0.102339, 0.0701755];
        for (i, v) in expected.iter().enumerate() {
            assert!((res.mass[1 << i].to_f64_lossy() - v).abs() < 1e-4);
        }
        assert!((res.value.to_f64() - 0.572124).abs() < 1e-4);
    }

    #[test]
    fn d2_restarts_agree() {
        let p = ApproxProblem::new(four_state(), ApproxKind::Martingale, Distance::D2).unwrap();
        let res = solve_inner(&p).unwrap();
        assert!(d2_multistart_spread(&p, &res, 10, 7).unwrap() < 1e-6);
    }

    #[test]
    fn default_q0_cases() {
        let q0 = default_q0(&four_state()).unwrap();
        assert_eq!(q0.singleton_values(), [rat(36, 420), rat(80, 420), rat(160, 420), rat(144, 420)]);
        let three = MarketModel::new(vec![r(4), r(2), rat(1, 4)], r(1), r(20), None).unwrap();
        assert_eq!(default_q0(&three).unwrap().singleton_values(), [rat(21, 210), rat(45, 210), rat(144, 210)]);
    }

    #[test]
    fn default_q0_of_boundary_model_is_positive() {
        let boundary = MarketModel::new(vec![r(3), r(2), r(1)], r(2), r(1), None).unwrap();
        let q0 = default_q0(&boundary).unwrap();
        assert!(q0.singleton_values().iter().all(|v| v.definitely_positive()));
    }

    #[test]
    fn contamination_cases() {
        let m = four_state();
        let s = m.space();
        let q0 = default_q0(&m).unwrap();
        let bel = mass(s, &[(0b0001, rat(21, 105)), (0b1100, rat(60, 105)), (0b1110, rat(24, 105))]).zeta_transform().unwrap();
        let mixed = epsilon_contaminate(&q0, &bel, &rat(1, 2)).unwrap();
        assert_eq!(mixed[0b0001], rat(60, 420));
        assert_eq!(mixed[0b1100], rat(272, 420));
        assert_eq!(mixed.choquet(&m.return_payoff()).unwrap(), r(1));

        assert_eq!(epsilon_contaminate(&q0, &bel, &r(0)), Err(Error::EpsOutOfRange));
        assert_eq!(epsilon_contaminate(&q0, &bel, &r(1)), Err(Error::EpsOutOfRange));
        let dirac = SetFunction::from_probability(s, &[r(1), r(0), r(0), r(0)]).unwrap();
        assert_eq!(epsilon_contaminate(&dirac, &bel, &rat(1, 2)), Err(Error::NotEquivalent { state: 2 }));
        assert_eq!(epsilon_contaminate(&bel, &bel, &rat(1, 2)), Err(Error::NotAProbability));
    }

    #[test]
    fn contaminating_the_envelope_breaks_the_martingale_property() {
        let m = four_state();
        let q0 = default_q0(&m).unwrap();
        let envelope = m.lower_envelope().unwrap();
        let eps = rat(1, 2);
        let mixed = epsilon_contaminate(&q0, &envelope, &eps).unwrap();
        let value = mixed.choquet(&m.return_payoff()).unwrap();
        assert_eq!(value, (r(1) - eps.clone()) + eps * rat(54, 105));
        assert!(value < r(1));
    }

    #[test]
    fn strong_solver_rejects_martingale_problem() {
        let p = ApproxProblem::new(four_state(), ApproxKind::Martingale, Distance::D1).unwrap();
        assert!(solve_strong(&p).is_err());
    }
}
