//! Dense two-phase tableau simplex with Bland's rule, generic over
//! [`Scalar`]. With [`Rational`](crate::scalar::Rational) every pivot is
//! exact and each outcome is replayed against the original data before it is
//! returned.
//!
//! Problems are stated as
//!
//! ```text
//! minimize cᵀx  subject to  A_eq x = b_eq,  A_le x ≤ b_le,  x_j ≥ 0 for flagged j.
//! ```
//!
//! Dual vectors list the equality rows first, then the `≤` rows.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Row<T> {
    pub coeffs: Vec<T>,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    num_vars: usize,
    objective: Vec<T>,
    eq_rows: Vec<Row<T>>,
    le_rows: Vec<Row<T>>,
    nonneg: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal {
        primal: Vec<T>,
        /// `y` with `Aᵀy ≤ c` on nonnegative columns, `= c` on free ones,
        /// `y ≤ 0` on `≤` rows, and `bᵀy = cᵀx`.
        dual: Vec<T>,
        objective: T,
    },
    Infeasible {
        /// `y` with `Aᵀy ≥ 0` on nonnegative columns, `= 0` on free ones,
        /// `y ≥ 0` on `≤` rows, and `bᵀy < 0`.
        farkas: Vec<T>,
    },
    Unbounded {
        primal: Vec<T>,
        /// Feasible direction of strictly decreasing objective.
        ray: Vec<T>,
    },
}

impl<T: Scalar> LpOutcome<T> {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    pub fn objective(&self) -> Option<&T> {
        match self {
            LpOutcome::Optimal { objective, .. } => Some(objective),
            _ => None,
        }
    }

    pub fn primal(&self) -> Option<&[T]> {
        match self {
            LpOutcome::Optimal { primal, .. } | LpOutcome::Unbounded { primal, .. } => Some(primal),
            LpOutcome::Infeasible { .. } => None,
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

impl<T: Scalar> LinearProgram<T> {
    /// `num_vars` nonnegative variables, zero objective, no constraints.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![T::zero(); num_vars],
            eq_rows: Vec::new(),
            le_rows: Vec::new(),
            nonneg: vec![true; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn eq_rows(&self) -> &[Row<T>] {
        &self.eq_rows
    }

    pub fn le_rows(&self) -> &[Row<T>] {
        &self.le_rows
    }

    pub fn nonneg(&self) -> &[bool] {
        &self.nonneg
    }

    pub fn num_rows(&self) -> usize {
        self.eq_rows.len() + self.le_rows.len()
    }

    /// Objective to minimize.
    pub fn set_objective(&mut self, c: Vec<T>) -> &mut Self {
        self.objective = c;
        self
    }

    pub fn set_free(&mut self, j: usize) -> &mut Self {
        self.nonneg[j] = false;
        self
    }

    pub fn add_eq(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.eq_rows.push(Row { coeffs, rhs });
        self
    }

    pub fn add_le(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.le_rows.push(Row { coeffs, rhs });
        self
    }

    /// Stored as the `≤` row `−aᵀx ≤ −b`.
    pub fn add_ge(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.add_le(coeffs.into_iter().map(|v| -v).collect(), -rhs)
    }

    /// Dense row from `(index, coefficient)` pairs.
    pub fn sparse_row(&self, entries: impl IntoIterator<Item = (usize, T)>) -> Vec<T> {
        let mut row = vec![T::zero(); self.num_vars];
        for (j, v) in entries {
            row[j] = row[j].clone() + v;
        }
        row
    }

    /// The same program over another scalar type.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearProgram<U> {
        let row = |r: &Row<T>| Row { coeffs: r.coeffs.iter().map(&f).collect(), rhs: f(&r.rhs) };
        LinearProgram {
            num_vars: self.num_vars,
            objective: self.objective.iter().map(&f).collect(),
            eq_rows: self.eq_rows.iter().map(row).collect(),
            le_rows: self.le_rows.iter().map(row).collect(),
            nonneg: self.nonneg.clone(),
        }
    }

    fn rows(&self) -> impl Iterator<Item = &Row<T>> {
        self.eq_rows.iter().chain(&self.le_rows)
    }

    fn check_dimensions(&self) -> Result<()> {
        let n = self.num_vars;
        if self.objective.len() != n {
            return Err(Error::DimensionMismatch(format!("objective has {} entries, expected {n}", self.objective.len())));
        }
        if self.nonneg.len() != n {
            return Err(Error::DimensionMismatch(format!("sign mask has {} entries, expected {n}", self.nonneg.len())));
        }
        if let Some((k, row)) = self.rows().enumerate().find(|(_, r)| r.coeffs.len() != n) {
            return Err(Error::DimensionMismatch(format!("row {k} has {} entries, expected {n}", row.coeffs.len())));
        }
        Ok(())
    }

    /// Largest violation of the constraints at `x` (zero when feasible).
    pub fn infeasibility(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        let mut bump = |v: T| {
            if v > worst {
                worst = v;
            }
        };
        for row in &self.eq_rows {
            bump((dot(&row.coeffs, x) - row.rhs.clone()).abs());
        }
        for row in &self.le_rows {
            bump(dot(&row.coeffs, x) - row.rhs.clone());
        }
        for (xj, &nn) in x.iter().zip(&self.nonneg) {
            if nn {
                bump(-xj.clone());
            }
        }
        worst
    }

    pub fn is_feasible(&self, x: &[T]) -> bool {
        x.len() == self.num_vars && !self.infeasibility(x).definitely_positive()
    }

    pub fn evaluate(&self, x: &[T]) -> T {
        dot(&self.objective, x)
    }

    /// `Aᵀy` for a dual vector ordered as equality rows then `≤` rows.
    fn transpose_times(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.num_vars];
        for (row, yi) in self.rows().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&row.coeffs) {
                if !a.is_zero() {
                    *o = o.clone() + a.clone() * yi.clone();
                }
            }
        }
        out
    }

    fn rhs(&self) -> Vec<T> {
        self.rows().map(|r| r.rhs.clone()).collect()
    }

    /// Checks a Farkas certificate of infeasibility.
    pub fn verify_farkas(&self, y: &[T]) -> bool {
        if y.len() != self.num_rows() {
            return false;
        }
        let aty = self.transpose_times(y);
        let columns_ok = aty.iter().zip(&self.nonneg).all(|(v, &nn)| {
            if nn {
                !v.definitely_negative()
            } else {
                v.approx_zero()
            }
        });
        let signs_ok = y[self.eq_rows.len()..].iter().all(|v| !v.definitely_negative());
        columns_ok && signs_ok && dot(&self.rhs(), y).definitely_negative()
    }

    /// Checks primal feasibility, dual feasibility and equal objectives.
    pub fn verify_optimal(&self, x: &[T], y: &[T]) -> bool {
        if x.len() != self.num_vars || y.len() != self.num_rows() || !self.is_feasible(x) {
            return false;
        }
        let aty = self.transpose_times(y);
        let dual_ok = aty.iter().zip(&self.objective).zip(&self.nonneg).all(|((v, c), &nn)| {
            let reduced = c.clone() - v.clone();
            if nn {
                !reduced.definitely_negative()
            } else {
                reduced.approx_zero()
            }
        });
        let signs_ok = y[self.eq_rows.len()..].iter().all(|v| !v.definitely_positive());
        // Objective agreement with a tolerance relative to the magnitudes.
        let primal_obj = self.evaluate(x);
        let dual_obj = dot(&self.rhs(), y);
        let scale = T::one() + primal_obj.abs() + dual_obj.abs();
        let gap_ok = !((primal_obj - dual_obj).abs() - T::tolerance() * (scale - T::one())).definitely_positive();
        dual_ok && signs_ok && gap_ok
    }

    /// Checks that `d` is a recession direction with negative cost.
    pub fn verify_ray(&self, d: &[T]) -> bool {
        if d.len() != self.num_vars {
            return false;
        }
        self.eq_rows.iter().all(|r| dot(&r.coeffs, d).approx_zero())
            && self.le_rows.iter().all(|r| !dot(&r.coeffs, d).definitely_positive())
            && d.iter().zip(&self.nonneg).all(|(v, &nn)| !nn || !v.definitely_negative())
            && self.evaluate(d).definitely_negative()
    }
}

impl<T: Scalar> fmt::Display for LinearProgram<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = |coeffs: &[T]| {
            let parts: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| format!("{}·x{j}", v.render()))
                .collect();
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        };
        writeln!(f, "minimize {}", terms(&self.objective))?;
        for row in &self.eq_rows {
            writeln!(f, "  {} = {}", terms(&row.coeffs), row.rhs.render())?;
        }
        for row in &self.le_rows {
            writeln!(f, "  {} <= {}", terms(&row.coeffs), row.rhs.render())?;
        }
        let free: Vec<String> = (0..self.num_vars).filter(|&j| !self.nonneg[j]).map(|j| format!("x{j}")).collect();
        if !free.is_empty() {
            writeln!(f, "  free: {}", free.join(", "))?;
        }
        Ok(())
    }
}

/// Consecutive degenerate pivots after which entering columns are chosen
/// by Bland's rule.
const DEGENERATE_RUN_LIMIT: usize = 20;

/// Origin of a standard-form column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    /// `sign · x_j` for original variable `j`.
    Var { j: usize, negated: bool },
    /// Slack of `≤` row `i` (index into all rows).
    Slack { row: usize },
    /// Phase-1 artificial of row `i`.
    Artificial { row: usize },
}

struct Tableau<T> {
    columns: Vec<Column>,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Reduced costs for the current phase.
    reduced: Vec<T>,
    value: T,
    /// Column that formed the identity for each row initially.
    identity: Vec<usize>,
    trace: Option<Vec<String>>,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> (Self, Vec<bool>) {
        let m = lp.num_rows();
        let mut columns = Vec::new();
        for j in 0..lp.num_vars {
            columns.push(Column::Var { j, negated: false });
            if !lp.nonneg[j] {
                columns.push(Column::Var { j, negated: true });
            }
        }
        let num_eq = lp.eq_rows.len();
        let mut slack_of = vec![None; m];
        for (i, slot) in slack_of.iter_mut().enumerate().skip(num_eq) {
            *slot = Some(columns.len());
            columns.push(Column::Slack { row: i });
        }
        let mut flipped = vec![false; m];
        let mut identity = vec![0; m];
        for (i, row) in lp.rows().enumerate() {
            flipped[i] = row.rhs.is_negative();
            match slack_of[i] {
                Some(c) if !flipped[i] => identity[i] = c,
                _ => {
                    identity[i] = columns.len();
                    columns.push(Column::Artificial { row: i });
                }
            }
        }
        let width = columns.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, row) in lp.rows().enumerate() {
            let sign = if flipped[i] { -T::one() } else { T::one() };
            let mut dense = vec![T::zero(); width];
            for (c, col) in columns.iter().enumerate() {
                dense[c] = match *col {
                    Column::Var { j, negated } => {
                        let a = row.coeffs[j].clone() * sign.clone();
                        if negated {
                            -a
                        } else {
                            a
                        }
                    }
                    Column::Slack { row: r } if r == i => sign.clone(),
                    Column::Artificial { row: r } if r == i => T::one(),
                    _ => T::zero(),
                };
            }
            rows.push(dense);
            rhs.push(row.rhs.clone() * sign);
        }
        let tableau = Self {
            columns,
            rows,
            rhs,
            basis: identity.clone(),
            reduced: vec![T::zero(); width],
            value: T::zero(),
            identity,
            trace: None,
        };
        (tableau, flipped)
    }

    fn is_artificial(&self, c: usize) -> bool {
        matches!(self.columns[c], Column::Artificial { .. })
    }

    fn install_costs(&mut self, cost: &[T]) {
        self.reduced = cost.to_vec();
        self.value = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (d, a) in self.reduced.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *d = d.clone() - cb.clone() * a.clone();
                }
            }
            self.value = self.value.clone() + cb * self.rhs[i].clone();
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                v.div_assign_by(&piv);
            }
        }
        self.rhs[r].div_assign_by(&piv);
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&c| !pivot_row[c].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][e].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &c in &nonzero {
                row[c].sub_mul_assign(&factor, &pivot_row[c]);
            }
            row[e] = T::zero();
            self.rhs[i].sub_mul_assign(&factor, &pivot_rhs);
        }
        let factor = self.reduced[e].clone();
        if !factor.is_zero() {
            for &c in &nonzero {
                self.reduced[c].sub_mul_assign(&factor, &pivot_row[c]);
            }
            self.reduced[e] = T::zero();
            self.value = self.value.clone() + factor * pivot_rhs;
        }
        self.basis[r] = e;
        if self.trace.is_some() {
            let dump = self.render();
            self.trace.as_mut().expect("checked").push(dump);
        }
    }

    /// Pivots to optimality with the most negative reduced cost, switching
    /// to Bland's rule during runs of degenerate pivots so that no basis
    /// repeats. Returns the entering column of an unbounded ray if one is
    /// found.
    fn optimize(&mut self, allow_artificial: bool) -> Option<usize> {
        let mut degenerate_run = 0;
        loop {
            let mut candidates = (0..self.columns.len())
                .filter(|&c| allow_artificial || !self.is_artificial(c))
                .filter(|&c| self.reduced[c].definitely_negative());
            let entering = if degenerate_run < DEGENERATE_RUN_LIMIT {
                candidates.min_by(|&a, &b| self.reduced[a].partial_cmp(&self.reduced[b]).expect("comparable"))
            } else {
                candidates.next()
            };
            let Some(e) = entering else { return None };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.definitely_positive() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br && !ratio.approx_eq(&br) {
                            Some((i, ratio))
                        } else if ratio.approx_eq(&br) && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                Some((r, ratio)) => {
                    if ratio.approx_zero() {
                        degenerate_run += 1;
                    } else {
                        degenerate_run = 0;
                    }
                    self.pivot(r, e);
                }
                None => return Some(e),
            }
        }
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn expel_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let candidate = (0..self.columns.len()).find(|&c| !self.is_artificial(c) && !self.rows[r][c].approx_zero());
            if let Some(e) = candidate {
                self.pivot(r, e);
            }
        }
    }

    fn standard_solution(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.columns.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }

    fn to_original(&self, standard: &[T], num_vars: usize) -> Vec<T> {
        let mut x = vec![T::zero(); num_vars];
        for (c, col) in self.columns.iter().enumerate() {
            if let Column::Var { j, negated } = *col {
                x[j] = if negated { x[j].clone() - standard[c].clone() } else { x[j].clone() + standard[c].clone() };
            }
        }
        x
    }

    /// Simplex multipliers of the standard-form rows under `cost`.
    fn multipliers(&self, cost: &[T]) -> Vec<T> {
        self.identity.iter().map(|&c| cost[c].clone() - self.reduced[c].clone()).collect()
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let name = |c: usize| match self.columns[c] {
            Column::Var { j, negated: false } => format!("x{j}"),
            Column::Var { j, negated: true } => format!("-x{j}"),
            Column::Slack { row } => format!("s{row}"),
            Column::Artificial { row } => format!("a{row}"),
        };
        let _ = writeln!(out, "basis | {} | rhs", (0..self.columns.len()).map(name).collect::<Vec<_>>().join(" "));
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(Scalar::render).collect();
            let _ = writeln!(out, "{} | {} | {}", name(self.basis[i]), cells.join(" "), self.rhs[i].render());
        }
        let cells: Vec<String> = self.reduced.iter().map(Scalar::render).collect();
        let _ = writeln!(out, "z | {} | {}", cells.join(" "), self.value.render());
        out
    }
}

/// Solves the program, replaying the certificate before returning.
pub fn lp_solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpOutcome<T>> {
    solve_inner(lp, false).map(|(outcome, _)| outcome)
}

/// As [`lp_solve`], also returning a plain-text dump of the tableau after
/// every pivot.
pub fn lp_solve_traced<T: Scalar>(lp: &LinearProgram<T>) -> Result<(LpOutcome<T>, Vec<String>)> {
    solve_inner(lp, true)
}

fn solve_inner<T: Scalar>(lp: &LinearProgram<T>, trace: bool) -> Result<(LpOutcome<T>, Vec<String>)> {
    lp.check_dimensions()?;
    let (mut tab, flipped) = Tableau::build(lp);
    if trace {
        tab.trace = Some(vec![tab.render()]);
    }
    let sign = |i: usize| if flipped[i] { -T::one() } else { T::one() };

    let phase1: Vec<T> =
        (0..tab.columns.len()).map(|c| if tab.is_artificial(c) { T::one() } else { T::zero() }).collect();
    tab.install_costs(&phase1);
    tab.optimize(true);
    if tab.value.definitely_positive() {
        let pi = tab.multipliers(&phase1);
        let farkas: Vec<T> = pi.into_iter().enumerate().map(|(i, p)| -(p * sign(i))).collect();
        if !lp.verify_farkas(&farkas) {
            return Err(Error::CertificateRejected("Farkas ray does not separate".into()));
        }
        return Ok((LpOutcome::Infeasible { farkas }, tab.trace.take().unwrap_or_default()));
    }
    tab.expel_artificials();

    let phase2: Vec<T> = tab
        .columns
        .iter()
        .map(|col| match *col {
            Column::Var { j, negated } => {
                if negated {
                    -lp.objective[j].clone()
                } else {
                    lp.objective[j].clone()
                }
            }
            _ => T::zero(),
        })
        .collect();
    tab.install_costs(&phase2);
    let unbounded = tab.optimize(false);
    let standard = tab.standard_solution();
    let primal = tab.to_original(&standard, lp.num_vars);
    let trace_out = tab.trace.take().unwrap_or_default();

    if let Some(e) = unbounded {
        let mut direction = vec![T::zero(); tab.columns.len()];
        direction[e] = T::one();
        for (i, &b) in tab.basis.iter().enumerate() {
            direction[b] = -tab.rows[i][e].clone();
        }
        let ray = tab.to_original(&direction, lp.num_vars);
        if !lp.is_feasible(&primal) || !lp.verify_ray(&ray) {
            return Err(Error::CertificateRejected("unbounded ray failed replay".into()));
        }
        return Ok((LpOutcome::Unbounded { primal, ray }, trace_out));
    }

    let pi = tab.multipliers(&phase2);
    let dual: Vec<T> = pi.into_iter().enumerate().map(|(i, p)| p * sign(i)).collect();
    if !lp.verify_optimal(&primal, &dual) {
        return Err(Error::CertificateRejected("optimal basis failed replay".into()));
    }
    let objective = lp.evaluate(&primal);
    Ok((LpOutcome::Optimal { primal, dual, objective }, trace_out))
}

/// Tests whether an optimal vertex `x` is the only optimum: maximizes the
/// total slack of the constraints active at `x` over the optimal face. A zero
/// maximum means the face is `{x}`.
///
/// `x` must be a vertex of the feasible region (a basic solution).
pub fn is_unique_optimum<T: Scalar>(lp: &LinearProgram<T>, x: &[T]) -> Result<bool> {
    let optimum = lp.evaluate(x);
    let mut face = lp.clone();
    face.add_le(lp.objective.clone(), optimum);
    let mut slack_weight = vec![T::zero(); lp.num_vars];
    let mut constant = T::zero();
    for (j, (xj, &nn)) in x.iter().zip(&lp.nonneg).enumerate() {
        if nn && xj.approx_zero() {
            slack_weight[j] = slack_weight[j].clone() + T::one();
        }
    }
    for row in &lp.le_rows {
        if (row.rhs.clone() - dot(&row.coeffs, x)).approx_zero() {
            // slack = rhs − aᵀx; maximizing it is minimizing aᵀx.
            for (w, a) in slack_weight.iter_mut().zip(&row.coeffs) {
                *w = w.clone() - a.clone();
            }
            constant = constant + row.rhs.clone();
        }
    }
    face.set_objective(slack_weight.into_iter().map(|v| -v).collect());
    match lp_solve(&face)? {
        LpOutcome::Optimal { objective, .. } => Ok(!(-(objective) + constant).definitely_positive()),
        LpOutcome::Unbounded { .. } => Ok(false),
        LpOutcome::Infeasible { .. } => Err(Error::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use proptest::prelude::*;

    fn r(v: i64) -> Rational {
        rat(v, 1)
    }

    #[test]
    fn one_variable_bound() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![r(1)]).add_ge(vec![r(1)], r(3));
        match lp_solve(&lp).unwrap() {
            LpOutcome::Optimal { primal, dual, objective } => {
                assert_eq!(primal, [r(3)]);
                assert_eq!(objective, r(3));
                assert_eq!(dual, [r(-1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y st x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36.
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![r(-3), r(-5)])
            .add_le(vec![r(1), r(0)], r(4))
            .add_le(vec![r(0), r(2)], r(12))
            .add_le(vec![r(3), r(2)], r(18));
        let out = lp_solve(&lp).unwrap();
        assert_eq!(out.primal().unwrap(), [r(2), r(6)]);
        assert_eq!(out.objective(), Some(&r(-36)));
    }

    #[test]
    fn infeasible_system_yields_farkas_ray() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(vec![r(1), r(1)], r(1)).add_eq(vec![r(1), r(1)], r(2));
        match lp_solve(&lp).unwrap() {
            LpOutcome::Infeasible { farkas } => assert!(lp.verify_farkas(&farkas)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbounded_program_yields_ray() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![r(-1), r(0)]).add_le(vec![r(1), r(-1)], r(1));
        match lp_solve(&lp).unwrap() {
            LpOutcome::Unbounded { ray, .. } => assert!(lp.verify_ray(&ray)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_variables() {
        // min |x - 2| style: min t st t ≥ x - 2, t ≥ 2 - x, x free, x = -1.
        let mut lp = LinearProgram::new(2);
        lp.set_free(0)
            .set_objective(vec![r(0), r(1)])
            .add_eq(vec![r(1), r(0)], r(-1))
            .add_le(vec![r(1), r(-1)], r(2))
            .add_le(vec![r(-1), r(-1)], r(-2));
        let out = lp_solve(&lp).unwrap();
        assert_eq!(out.primal().unwrap(), [r(-1), r(3)]);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(3);
        lp.set_objective(vec![r(1), r(2), r(3)])
            .add_eq(vec![r(1), r(1), r(1)], r(1))
            .add_eq(vec![r(2), r(2), r(2)], r(2))
            .add_eq(vec![r(0), r(1), r(1)], rat(1, 2));
        let out = lp_solve(&lp).unwrap();
        assert_eq!(out.primal().unwrap(), [rat(1, 2), rat(1, 2), r(0)]);
        assert_eq!(out.objective(), Some(&rat(3, 2)));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(vec![r(1)], r(1));
        assert!(matches!(lp_solve(&lp), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn trace_contains_every_pivot() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![r(-1), r(-1)]).add_le(vec![r(1), r(2)], r(4)).add_le(vec![r(3), r(1)], r(6));
        let (out, trace) = lp_solve_traced(&lp).unwrap();
        assert!(out.is_optimal());
        assert!(trace.len() >= 2);
        assert!(trace[0].starts_with("basis |"));
    }

    #[test]
    fn uniqueness_of_optimal_vertex() {
        // min x + y on the simplex: every point is optimal.
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![r(1), r(1)]).add_eq(vec![r(1), r(1)], r(1));
        let x = lp_solve(&lp).unwrap().primal().unwrap().to_vec();
        assert!(!is_unique_optimum(&lp, &x).unwrap());
        lp.set_objective(vec![r(1), r(2)]);
        let x = lp_solve(&lp).unwrap().primal().unwrap().to_vec();
        assert!(is_unique_optimum(&lp, &x).unwrap());
    }

    #[test]
    fn floating_point_instantiation() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.set_objective(vec![-1.0, -2.0]).add_le(vec![1.0, 1.0], 3.0).add_le(vec![0.0, 1.0], 2.0);
        let out = lp_solve(&lp).unwrap();
        let x = out.primal().unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Random small programs: whatever the outcome, it replays, and a
        // feasible point rules out infeasibility.
        #[test]
        fn outcomes_replay(
            seed in prop::collection::vec(-5i64..=5, 3 * 4 + 3 + 3),
            signs in prop::collection::vec(any::<bool>(), 3),
        ) {
            let n = 3;
            let mut lp = LinearProgram::new(n);
            lp.set_objective(seed[..n].iter().map(|&v| r(v)).collect());
            let feasible_point = [r(1), r(1), r(1)];
            for k in 0..4 {
                let coeffs: Vec<Rational> = seed[n + 3 * k..n + 3 * k + 3].iter().map(|&v| r(v)).collect();
                let at_point = dot(&coeffs, &feasible_point);
                if k == 0 && signs[0] {
                    lp.add_eq(coeffs, at_point);
                } else {
                    lp.add_le(coeffs, at_point + r(seed[n + 12 + k % 3].abs()));
                }
            }
            for (j, &free) in signs.iter().enumerate().skip(1) {
                if free {
                    lp.set_free(j);
                }
            }
            match lp_solve(&lp).unwrap() {
                LpOutcome::Optimal { primal, dual, .. } => prop_assert!(lp.verify_optimal(&primal, &dual)),
                LpOutcome::Unbounded { ray, .. } => prop_assert!(lp.verify_ray(&ray)),
                LpOutcome::Infeasible { .. } => prop_assert!(false, "a feasible point exists"),
            }
        }
    }
}
