//! Active-set methods for dense convex quadratic programs
//!
//! ```text
//! minimize ½ xᵀHx + cᵀx  subject to the rows and sign flags of a LinearProgram
//! ```
//!
//! in `f64`.

use nalgebra::{DMatrix, DVector};

use super::lp::{lp_solve, LinearProgram, LpOutcome};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub x: Vec<f64>,
    /// `½ xᵀHx + cᵀx`.
    pub objective: f64,
    pub iterations: usize,
    /// Max of stationarity error, primal violation and multiplier sign
    /// violation at the returned point.
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpOptions {
    pub tol: f64,
    pub max_iterations: Option<usize>,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iterations: None }
    }
}

/// An inequality `aᵀx ≤ b`: either a `≤` row or a sign bound `−x_j ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ineq {
    Row(usize),
    Bound(usize),
}

/// Relative size of the right-hand-side relaxations that break degeneracy.
const PERTURBATION: f64 = 1e-9;

struct Constraints<'a> {
    lp: &'a LinearProgram<f64>,
    ineqs: Vec<Ineq>,
    /// Relaxation added to each inequality's right-hand side.
    shift: Vec<f64>,
}

impl<'a> Constraints<'a> {
    fn new(lp: &'a LinearProgram<f64>) -> Self {
        let mut ineqs: Vec<Ineq> = (0..lp.le_rows().len()).map(Ineq::Row).collect();
        ineqs.extend((0..lp.num_vars()).filter(|&j| lp.nonneg()[j]).map(Ineq::Bound));
        // Distinct, irregular relaxations (golden-ratio sequence).
        let shift = (0..ineqs.len())
            .map(|k| PERTURBATION * (0.5 + (k as f64 * 0.618_033_988_749_895).fract()))
            .collect();
        Self { lp, ineqs, shift }
    }

    fn times(&self, k: usize, v: &[f64]) -> f64 {
        match self.ineqs[k] {
            Ineq::Row(i) => self.lp.le_rows()[i].coeffs.iter().zip(v).map(|(a, b)| a * b).sum(),
            Ineq::Bound(j) => -v[j],
        }
    }

    fn rhs(&self, k: usize) -> f64 {
        match self.ineqs[k] {
            Ineq::Row(i) => self.lp.le_rows()[i].rhs,
            Ineq::Bound(_) => 0.0,
        }
    }

    fn relaxed_rhs(&self, k: usize) -> f64 {
        self.rhs(k) + self.shift[k]
    }

    fn dense(&self, k: usize) -> Vec<f64> {
        match self.ineqs[k] {
            Ineq::Row(i) => self.lp.le_rows()[i].coeffs.clone(),
            Ineq::Bound(j) => {
                let mut row = vec![0.0; self.lp.num_vars()];
                row[j] = -1.0;
                row
            }
        }
    }

    /// Equality rows followed by the working-set inequalities.
    fn active_matrix(&self, working: &[usize]) -> DMatrix<f64> {
        let n = self.lp.num_vars();
        let rows = self.lp.eq_rows().len() + working.len();
        let mut a = DMatrix::zeros(rows, n);
        for (i, row) in self.lp.eq_rows().iter().enumerate() {
            for (j, v) in row.coeffs.iter().enumerate() {
                a[(i, j)] = *v;
            }
        }
        for (k, &w) in working.iter().enumerate() {
            for (j, v) in self.dense(w).into_iter().enumerate() {
                a[(self.lp.eq_rows().len() + k, j)] = v;
            }
        }
        a
    }

    /// True right-hand sides of the equality rows and working inequalities.
    fn active_rhs(&self, working: &[usize]) -> DVector<f64> {
        let eq = self.lp.eq_rows().iter().map(|r| r.rhs);
        DVector::from_iterator(self.lp.eq_rows().len() + working.len(), eq.chain(working.iter().map(|&k| self.rhs(k))))
    }
}

fn objective(h: &DMatrix<f64>, c: &DVector<f64>, x: &DVector<f64>) -> f64 {
    0.5 * x.dot(&(h * x)) + c.dot(x)
}

/// Solves `[H Aᵀ; A 0] [x; λ] = [−c; b]`.
fn solve_kkt(h: &DMatrix<f64>, a: &DMatrix<f64>, c: &DVector<f64>, b: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let n = h.nrows();
    let k = a.nrows();
    let mut kkt = DMatrix::zeros(n + k, n + k);
    kkt.view_mut((0, 0), (n, n)).copy_from(h);
    kkt.view_mut((0, n), (n, k)).copy_from(&a.transpose());
    kkt.view_mut((n, 0), (k, n)).copy_from(a);
    let mut rhs = DVector::zeros(n + k);
    rhs.rows_mut(0, n).copy_from(&(-c));
    rhs.rows_mut(n, k).copy_from(b);
    let residual_ok = |sol: &DVector<f64>| {
        let r = &kkt * sol - &rhs;
        r.amax() <= 1e-10 * (1.0 + rhs.amax())
    };
    let sol = match kkt.clone().lu().solve(&rhs) {
        Some(sol) if sol.iter().all(|v| v.is_finite()) && residual_ok(&sol) => sol,
        _ => kkt.clone().svd(true, true).solve(&rhs, 1e-12).expect("both factors computed"),
    };
    (sol.rows(0, n).into_owned(), sol.rows(n, k).into_owned())
}

/// Finds a feasible point with the simplex method.
pub fn feasible_point(constraints: &LinearProgram<f64>) -> Result<Vec<f64>> {
    let mut lp = constraints.clone();
    lp.set_objective(vec![0.0; lp.num_vars()]);
    match lp_solve(&lp)? {
        LpOutcome::Optimal { primal, .. } | LpOutcome::Unbounded { primal, .. } => Ok(primal),
        LpOutcome::Infeasible { .. } => Err(Error::Infeasible),
    }
}

/// Minimizes `½ xᵀHx + cᵀx` over the feasible set of `constraints` (whose
/// own objective is ignored). `start`, when given, must be feasible.
///
/// Variables that a zero-rhs equality row with one-signed coefficients pins
/// to zero are removed first. Without a start and with `H` positive
/// definite, the dual method of Goldfarb and Idnani runs from the
/// unconstrained minimizer; it needs no feasible point and is not troubled
/// by degenerate vertices. Otherwise a primal active-set method runs from
/// `start` (or a simplex vertex) on a copy of the problem whose
/// inequalities are relaxed by distinct amounts of order `1e-9`, so the
/// active set cannot cycle. Either way the final working set is re-solved
/// against the true right-hand sides.
pub fn qp_solve(
    h: &DMatrix<f64>,
    c: &[f64],
    constraints: &LinearProgram<f64>,
    options: QpOptions,
    start: Option<&[f64]>,
) -> Result<QpSolution> {
    let n = constraints.num_vars();
    if h.nrows() != n || h.ncols() != n || c.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "Hessian is {}x{} and linear term has {} entries for {n} variables",
            h.nrows(),
            h.ncols(),
            c.len()
        )));
    }
    if let Some(s) = start {
        if s.len() != n || constraints.infeasibility(s) > options.tol {
            return Err(Error::Infeasible);
        }
    }
    let fixed = forced_zeros(constraints);
    if !fixed.iter().any(|&f| f) {
        return solve_reduced(h, c, constraints, options, start);
    }
    let keep: Vec<usize> = (0..n).filter(|&j| !fixed[j]).collect();
    let reduced = restrict(constraints, &keep);
    let h_reduced = h.select_rows(&keep).select_columns(&keep);
    let c_reduced: Vec<f64> = keep.iter().map(|&j| c[j]).collect();
    let start_reduced: Option<Vec<f64>> = start.map(|s| keep.iter().map(|&j| s[j]).collect());
    let expand = |v: &[f64]| {
        let mut full = vec![0.0; n];
        for (&j, &x) in keep.iter().zip(v) {
            full[j] = x;
        }
        full
    };
    match solve_reduced(&h_reduced, &c_reduced, &reduced, options, start_reduced.as_deref()) {
        // Multipliers of the removed sign bounds are absorbed by the pinning
        // row, so the residual of the reduced problem is the one reported.
        Ok(sol) => Ok(QpSolution { x: expand(&sol.x), ..sol }),
        Err(Error::NotConverged { iterations, residual, best }) => {
            Err(Error::NotConverged { iterations, residual, best: expand(&best) })
        }
        Err(e) => Err(e),
    }
}

/// Variables forced to zero: a zero-rhs equality row whose coefficients on
/// the remaining variables are all nonnegative (or all nonpositive) and
/// vanish on free variables pins every variable it touches.
fn forced_zeros(lp: &LinearProgram<f64>) -> Vec<bool> {
    let n = lp.num_vars();
    let mut fixed = vec![false; n];
    loop {
        let mut changed = false;
        for row in lp.eq_rows().iter().filter(|r| r.rhs == 0.0) {
            let live = |j: usize| !fixed[j] && row.coeffs[j] != 0.0;
            if (0..n).any(|j| live(j) && !lp.nonneg()[j]) {
                continue;
            }
            let pos = (0..n).any(|j| live(j) && row.coeffs[j] > 0.0);
            let neg = (0..n).any(|j| live(j) && row.coeffs[j] < 0.0);
            if pos != neg {
                let pinned: Vec<usize> = (0..n).filter(|&j| live(j)).collect();
                for j in pinned {
                    fixed[j] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return fixed;
        }
    }
}

/// The problem restricted to the `keep` columns, with rows that become
/// empty and trivially satisfied dropped.
fn restrict(lp: &LinearProgram<f64>, keep: &[usize]) -> LinearProgram<f64> {
    let mut out = LinearProgram::<f64>::new(keep.len());
    for (k, &j) in keep.iter().enumerate() {
        if !lp.nonneg()[j] {
            out.set_free(k);
        }
    }
    for row in lp.eq_rows() {
        let coeffs: Vec<f64> = keep.iter().map(|&j| row.coeffs[j]).collect();
        if coeffs.iter().any(|&v| v != 0.0) || row.rhs != 0.0 {
            out.add_eq(coeffs, row.rhs);
        }
    }
    for row in lp.le_rows() {
        let coeffs: Vec<f64> = keep.iter().map(|&j| row.coeffs[j]).collect();
        if coeffs.iter().any(|&v| v != 0.0) || row.rhs < 0.0 {
            out.add_le(coeffs, row.rhs);
        }
    }
    out
}

fn solve_reduced(
    h: &DMatrix<f64>,
    c: &[f64],
    constraints: &LinearProgram<f64>,
    options: QpOptions,
    start: Option<&[f64]>,
) -> Result<QpSolution> {
    let cons = Constraints::new(constraints);
    let c = DVector::from_column_slice(c);
    let n = constraints.num_vars();
    let cap = options.max_iterations.unwrap_or(1000 + 20 * (n + cons.ineqs.len()));
    if start.is_none() {
        if let Some(chol) = h.clone().cholesky() {
            return dual_active_set(h, &chol, &c, &cons, options.tol, cap);
        }
    }
    let x0 = match start {
        Some(s) => s.to_vec(),
        None => feasible_point(constraints)?,
    };
    primal_active_set(h, &c, &cons, x0, options.tol, cap)
}

/// A constraint in the dual method, written `normalᵀx ≥ rhs`.
struct DualRow {
    ineq: Option<usize>,
    normal: DVector<f64>,
    rhs: f64,
    multiplier: f64,
}

fn dual_active_set(
    h: &DMatrix<f64>,
    chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
    c: &DVector<f64>,
    cons: &Constraints<'_>,
    tol: f64,
    cap: usize,
) -> Result<QpSolution> {
    let n = cons.lp.num_vars();
    let feas_tol = 1e-2 * tol;
    let mut x = -chol.solve(c);
    let mut active: Vec<DualRow> = Vec::new();
    let mut pending_eq: Vec<usize> = (0..cons.lp.eq_rows().len()).rev().collect();
    let mut iterations = 0;
    loop {
        // Pick a violated constraint: pending equalities first, then the
        // inequality with the largest scaled violation.
        let candidate = if let Some(i) = pending_eq.pop() {
            let row = &cons.lp.eq_rows()[i];
            let a = DVector::from_column_slice(&row.coeffs);
            let sign = if a.dot(&x) > row.rhs { -1.0 } else { 1.0 };
            Some(DualRow { ineq: None, normal: sign * a, rhs: sign * row.rhs, multiplier: 0.0 })
        } else {
            let mut worst: Option<(usize, f64)> = None;
            for k in 0..cons.ineqs.len() {
                if active.iter().any(|r| r.ineq == Some(k)) {
                    continue;
                }
                let dense = cons.dense(k);
                let norm = dense.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
                let scaled = (cons.rhs(k) - cons.times(k, x.as_slice())) / norm;
                if scaled < -feas_tol && worst.is_none_or(|(_, w)| scaled < w) {
                    worst = Some((k, scaled));
                }
            }
            worst.map(|(k, _)| DualRow {
                ineq: Some(k),
                normal: -DVector::from_vec(cons.dense(k)),
                rhs: -cons.rhs(k),
                multiplier: 0.0,
            })
        };
        let Some(mut p) = candidate else {
            let working: Vec<usize> = active.iter().filter_map(|r| r.ineq).collect();
            return Ok(finish(h, c, cons, &working, x, iterations, tol));
        };
        loop {
            iterations += 1;
            if iterations > cap {
                let working: Vec<usize> = active.iter().filter_map(|r| r.ineq).collect();
                let g = h * &x + c;
                let a = cons.active_matrix(&working);
                let (_, lambda) = solve_kkt(h, &a, &g, &DVector::zeros(a.nrows()));
                return Err(Error::NotConverged {
                    iterations: cap,
                    residual: kkt_residual(h, c, cons, &working, &x, &lambda),
                    best: x.as_slice().to_vec(),
                });
            }
            let v = chol.solve(&p.normal);
            let (z, r) = if active.is_empty() {
                (v.clone(), DVector::zeros(0))
            } else {
                let mut normals = DMatrix::zeros(n, active.len());
                for (j, row) in active.iter().enumerate() {
                    normals.set_column(j, &row.normal);
                }
                let w = chol.solve(&normals);
                let m = normals.transpose() * &w;
                let rhs = normals.transpose() * &v;
                let r = match m.clone().cholesky() {
                    Some(f) => f.solve(&rhs),
                    None => m.svd(true, true).solve(&rhs, 1e-14).expect("both factors computed"),
                };
                (&v - &w * &r, r)
            };
            let curvature = p.normal.dot(&z);
            let dependent = curvature <= 1e-12 * p.normal.dot(&v).max(f64::MIN_POSITIVE);
            let slack = p.normal.dot(&x) - p.rhs;
            let r_floor = 1e-13 * r.amax();
            let mut partial: Option<(usize, f64)> = None;
            for (j, row) in active.iter().enumerate() {
                if row.ineq.is_some() && r[j] > r_floor {
                    let t = row.multiplier.max(0.0) / r[j];
                    if partial.is_none_or(|(_, best)| t < best) {
                        partial = Some((j, t));
                    }
                }
            }
            let full = if dependent { None } else { Some((-slack / curvature).max(0.0)) };
            match (full, partial) {
                (None, None) => {
                    if p.ineq.is_none() && slack.abs() <= tol * (1.0 + p.rhs.abs()) {
                        break;
                    }
                    return Err(Error::Infeasible);
                }
                (None, Some((l, t))) => {
                    for (j, row) in active.iter_mut().enumerate() {
                        row.multiplier -= t * r[j];
                    }
                    p.multiplier += t;
                    active.remove(l);
                }
                (Some(t_full), partial) => {
                    let step = partial.map_or(t_full, |(_, t)| t.min(t_full));
                    x += step * &z;
                    for (j, row) in active.iter_mut().enumerate() {
                        row.multiplier -= step * r[j];
                    }
                    p.multiplier += step;
                    match partial {
                        Some((l, t)) if t < t_full => {
                            active.remove(l);
                        }
                        _ => {
                            active.push(p);
                            break;
                        }
                    }
                }
            }
        }
    }
}

fn primal_active_set(
    h: &DMatrix<f64>,
    c: &DVector<f64>,
    cons: &Constraints<'_>,
    x0: Vec<f64>,
    tol: f64,
    cap: usize,
) -> Result<QpSolution> {
    let mut x = DVector::from_vec(x0);
    let num_eq = cons.lp.eq_rows().len();
    // Start with the equality rows only; every inequality has slack of at
    // least its relaxation at a feasible point.
    let mut working: Vec<usize> = Vec::new();
    let step_tol = 1e-12 * (1.0 + x.amax());
    for iteration in 0..cap {
        let g = h * &x + c;
        let a = cons.active_matrix(&working);
        let (p, lambda) = solve_kkt(h, &a, &g, &DVector::zeros(a.nrows()));
        if p.amax() <= step_tol {
            let worst = (0..working.len()).map(|k| (k, lambda[num_eq + k])).min_by(|a, b| a.1.total_cmp(&b.1));
            match worst {
                Some((k, value)) if value < -tol => {
                    working.remove(k);
                }
                _ => return Ok(finish(h, c, cons, &working, x, iteration, tol)),
            }
            continue;
        }
        let mut alpha = 1.0;
        let mut blocking = None;
        for k in 0..cons.ineqs.len() {
            if working.contains(&k) {
                continue;
            }
            let ap = cons.times(k, p.as_slice());
            if ap > 1e-14 {
                let step = ((cons.relaxed_rhs(k) - cons.times(k, x.as_slice())) / ap).max(0.0);
                if step < alpha {
                    alpha = step;
                    blocking = Some(k);
                }
            }
        }
        x += alpha * &p;
        if let Some(k) = blocking {
            working.push(k);
        }
    }
    let g = h * &x + c;
    let a = cons.active_matrix(&working);
    let (_, lambda) = solve_kkt(h, &a, &g, &DVector::zeros(a.nrows()));
    Err(Error::NotConverged {
        iterations: cap,
        residual: kkt_residual(h, c, cons, &working, &x, &lambda),
        best: x.as_slice().to_vec(),
    })
}

/// Re-solves the final working set against the true right-hand sides and
/// keeps whichever of the two points has the smaller KKT residual.
fn finish(
    h: &DMatrix<f64>,
    c: &DVector<f64>,
    cons: &Constraints<'_>,
    working: &[usize],
    relaxed: DVector<f64>,
    iterations: usize,
    tol: f64,
) -> QpSolution {
    let a = cons.active_matrix(working);
    let (polished, lambda) = solve_kkt(h, &a, c, &cons.active_rhs(working));
    // The KKT system above uses Hx + Aᵀλ = −c; residuals use the same sign.
    let polished_residual = kkt_residual(h, c, cons, working, &polished, &lambda);
    let g = h * &relaxed + c;
    let (_, lambda_relaxed) = solve_kkt(h, &a, &g, &DVector::zeros(a.nrows()));
    let relaxed_residual = kkt_residual(h, c, cons, working, &relaxed, &lambda_relaxed);
    let (x, kkt_residual) = if polished_residual <= relaxed_residual.max(tol) {
        (polished, polished_residual)
    } else {
        (relaxed, relaxed_residual)
    };
    let objective = objective(h, c, &x);
    QpSolution { x: x.as_slice().to_vec(), objective, iterations, kkt_residual }
}

fn kkt_residual(
    h: &DMatrix<f64>,
    c: &DVector<f64>,
    cons: &Constraints<'_>,
    working: &[usize],
    x: &DVector<f64>,
    lambda: &DVector<f64>,
) -> f64 {
    let a = cons.active_matrix(working);
    let stationarity = (h * x + c + a.transpose() * lambda).amax();
    let primal = cons.lp.infeasibility(x.as_slice()).max(0.0);
    let num_eq = cons.lp.eq_rows().len();
    let sign = (num_eq..lambda.len()).map(|k| (-lambda[k]).max(0.0)).fold(0.0, f64::max);
    let complementarity = working.iter().map(|&k| (cons.rhs(k) - cons.times(k, x.as_slice())).abs()).fold(0.0, f64::max);
    stationarity.max(primal).max(sign).max(complementarity)
}

/// Frank–Wolfe gap `∇f(x)ᵀx − min_{y feasible} ∇f(x)ᵀy`: nonnegative, and
/// zero exactly at minimizers of a convex objective.
pub fn frank_wolfe_gap(gradient: &[f64], x: &[f64], constraints: &LinearProgram<f64>) -> Result<f64> {
    let mut lp = constraints.clone();
    lp.set_objective(gradient.to_vec());
    match lp_solve(&lp)? {
        LpOutcome::Optimal { objective, .. } => {
            let at_x: f64 = gradient.iter().zip(x).map(|(g, v)| g * v).sum();
            Ok(at_x - objective)
        }
        LpOutcome::Unbounded { .. } => Ok(f64::INFINITY),
        LpOutcome::Infeasible { .. } => Err(Error::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Euclidean projection onto the probability simplex by sorting.
    fn simplex_projection(v: &[f64]) -> Vec<f64> {
        let mut u = v.to_vec();
        u.sort_by(|a, b| b.total_cmp(a));
        let mut cumulative = 0.0;
        let mut theta = 0.0;
        for (k, &uk) in u.iter().enumerate() {
            cumulative += uk;
            let t = (cumulative - 1.0) / (k as f64 + 1.0);
            if uk - t > 0.0 {
                theta = t;
            }
        }
        v.iter().map(|&vi| (vi - theta).max(0.0)).collect()
    }

    fn project(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut lp = LinearProgram::<f64>::new(n);
        lp.add_eq(vec![1.0; n], 1.0);
        let h = DMatrix::identity(n, n) * 2.0;
        let c: Vec<f64> = v.iter().map(|vi| -2.0 * vi).collect();
        qp_solve(&h, &c, &lp, QpOptions::default(), None).unwrap().x
    }

    #[test]
    fn unconstrained_projection_identity() {
        let target = [1.5, -2.0, 0.25];
        let mut lp = LinearProgram::<f64>::new(3);
        for j in 0..3 {
            lp.set_free(j);
        }
        let h = DMatrix::identity(3, 3) * 2.0;
        let c: Vec<f64> = target.iter().map(|t| -2.0 * t).collect();
        let sol = qp_solve(&h, &c, &lp, QpOptions::default(), None).unwrap();
        for (x, t) in sol.x.iter().zip(target) {
            assert!((x - t).abs() < 1e-10);
        }
        assert!(sol.kkt_residual < 1e-9);
    }

    #[test]
    fn projection_onto_simplex_cases() {
        let x = project(&[0.9, 0.8, -1.0]);
        assert!((x[0] - 0.55).abs() < 1e-10 && (x[1] - 0.45).abs() < 1e-10 && x[2].abs() < 1e-10);
    }

    #[test]
    fn respects_le_rows() {
        // min (x-2)² + (y-2)² st x + y ≤ 2 → (1, 1).
        let mut lp = LinearProgram::<f64>::new(2);
        lp.add_le(vec![1.0, 1.0], 2.0);
        let h = DMatrix::identity(2, 2) * 2.0;
        let sol = qp_solve(&h, &[-4.0, -4.0], &lp, QpOptions::default(), None).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-10 && (sol.x[1] - 1.0).abs() < 1e-10);
        let g: Vec<f64> = sol.x.iter().map(|v| 2.0 * v - 4.0).collect();
        assert!(frank_wolfe_gap(&g, &sol.x, &lp).unwrap().abs() < 1e-9);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.add_eq(vec![1.0, 1.0], 1.0);
        let h = DMatrix::identity(2, 2);
        assert_eq!(qp_solve(&h, &[0.0, 0.0], &lp, QpOptions::default(), Some(&[1.0, 1.0])), Err(Error::Infeasible));
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let mut lp = LinearProgram::<f64>::new(3);
        lp.add_eq(vec![1.0; 3], 1.0);
        let h = DMatrix::identity(3, 3) * 2.0;
        let options = QpOptions { tol: 1e-9, max_iterations: Some(0) };
        match qp_solve(&h, &[-2.0, 0.0, 0.0], &lp, options, None) {
            Err(Error::NotConverged { best, .. }) => assert_eq!(best.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn simplex_projection_matches_oracle(v in prop::collection::vec(-3.0f64..3.0, 2..8)) {
            let x = project(&v);
            let expected = simplex_projection(&v);
            for (a, b) in x.iter().zip(&expected) {
                prop_assert!((a - b).abs() < 1e-8, "{:?} vs {:?}", x, expected);
            }
        }
    }
}
