//! A small dense linear-program solver and basic-feasible-solution enumeration.
//!
//! Problems here have at most a few hundred variables, so the solver is the
//! textbook two-phase primal simplex on a full tableau, using Bland's rule to
//! rule out cycling.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::linalg::{rank_and_nullity, solve_full_column_rank, Matrix};
use crate::{Error, Result, Tolerances};

/// Threshold below which a reduced cost or pivot candidate counts as zero.
const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `optimize objective . x` subject to `eq_lhs x = eq_rhs`, `x >= 0`, and
/// optionally one extra constraint `coeffs . x <= bound`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_lhs: Matrix,
    pub eq_rhs: Vec<f64>,
    pub extra_ineq: Option<(Vec<f64>, f64)>,
    pub sense: Sense,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(
        objective: Vec<f64>,
        eq_lhs: Matrix,
        eq_rhs: Vec<f64>,
        sense: Sense,
    ) -> Result<Self> {
        if eq_lhs.cols() != objective.len() {
            return Err(Error::BadShape(
                "objective length differs from constraint columns",
            ));
        }
        if eq_lhs.rows() != eq_rhs.len() {
            return Err(Error::BadShape(
                "right-hand side length differs from constraint rows",
            ));
        }
        Ok(LinearProgram {
            objective,
            eq_lhs,
            eq_rhs,
            extra_ineq: None,
            sense,
        })
    }

    pub fn with_upper_bound(mut self, coeffs: Vec<f64>, bound: f64) -> Result<Self> {
        if coeffs.len() != self.objective.len() {
            return Err(Error::BadShape("inequality length differs from objective"));
        }
        self.extra_ineq = Some((coeffs, bound));
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Largest violation of the constraints at `x` (equalities, the extra
    /// inequality and nonnegativity).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = self
            .eq_lhs
            .mul_vec(x)
            .iter()
            .zip(&self.eq_rhs)
            .map(|(l, r)| (l - r).abs())
            .fold(0.0, f64::max);
        if let Some((c, bound)) = &self.extra_ineq {
            worst = worst.max(dot(c, x) - bound);
        }
        x.iter().fold(worst, |w, v| w.max(-v))
    }

    fn rhs_scale(&self) -> f64 {
        let b = self.eq_rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let extra = self.extra_ineq.as_ref().map_or(0.0, |(_, u)| u.abs());
        1.0 + b.max(extra)
    }
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<f64>>,
    /// Reduced costs; the last entry is minus the current objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

enum Pivoting {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        *self.rows[i].last().unwrap()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Minimizes over the columns `0..active` with Bland's rule.
    fn run(&mut self, active: usize, pivots: &mut usize) -> Result<Pivoting> {
        loop {
            let Some(enter) = (0..active).find(|&j| self.cost[j] < -PIVOT_EPS) else {
                return Ok(Pivoting::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let better = ratio < best - PIVOT_EPS
                            || (ratio <= best + PIVOT_EPS && self.basis[i] < self.basis[k]);
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(Pivoting::Unbounded);
            };
            self.pivot(r, enter);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::NumericalFailure("pivot limit exceeded"));
            }
        }
    }
}

/// Solves `lp` with the two-phase simplex method.
///
/// An `Optimal` outcome is only returned after the recovered point passes a
/// residual check at `tol.lp`; otherwise the result is `NumericalFailure`.
pub fn solve_lp(lp: &LinearProgram, tol: &Tolerances) -> Result<LpOutcome> {
    let n = lp.num_vars();
    let has_slack = lp.extra_ineq.is_some();
    let n_struct = n + usize::from(has_slack);

    let mut raw_rows: Vec<(Vec<f64>, f64)> = (0..lp.eq_lhs.rows())
        .map(|i| {
            let mut row = lp.eq_lhs.row(i).to_vec();
            if has_slack {
                row.push(0.0);
            }
            (row, lp.eq_rhs[i])
        })
        .collect();
    if let Some((c, bound)) = &lp.extra_ineq {
        let mut row = c.clone();
        row.push(1.0);
        raw_rows.push((row, *bound));
    }
    let m = raw_rows.len();
    let width = n_struct + m + 1;

    let mut rows = Vec::with_capacity(m);
    for (i, (mut row, mut b)) in raw_rows.into_iter().enumerate() {
        if b < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            b = -b;
        }
        row.resize(width, 0.0);
        row[n_struct + i] = 1.0;
        row[width - 1] = b;
        rows.push(row);
    }

    // phase one: minimize the sum of artificials
    let mut cost = vec![0.0; width];
    for row in &rows {
        for j in 0..n_struct {
            cost[j] -= row[j];
        }
        cost[width - 1] -= row[width - 1];
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (n_struct..n_struct + m).collect(),
    };
    let mut pivots = 0;
    if let Pivoting::Unbounded = t.run(n_struct + m, &mut pivots)? {
        return Err(Error::NumericalFailure("phase one reported unbounded"));
    }
    let infeasibility = -t.cost[width - 1];
    if infeasibility > tol.lp * lp.rhs_scale() {
        return Ok(LpOutcome::Infeasible);
    }

    // drive artificials out of the basis; rows where that is impossible are redundant
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n_struct {
            let col = (0..n_struct)
                .filter(|&j| t.rows[i][j].abs() > PIVOT_EPS)
                .max_by(|&a, &b| t.rows[i][a].abs().total_cmp(&t.rows[i][b].abs()));
            match col {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    for row in t.rows.iter_mut() {
        let rhs = row[width - 1];
        row.truncate(n_struct);
        row.push(rhs);
    }

    // phase two
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut c = vec![0.0; n_struct + 1];
    for j in 0..n {
        c[j] = sign * lp.objective[j];
    }
    let mut cost = c.clone();
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        let cb = c[b];
        if cb != 0.0 {
            for (v, a) in cost.iter_mut().zip(row) {
                *v -= cb * a;
            }
        }
    }
    t.cost = cost;
    if let Pivoting::Unbounded = t.run(n_struct, &mut pivots)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut point = vec![0.0; n_struct];
    for (i, &b) in t.basis.iter().enumerate() {
        point[b] = t.rhs(i);
    }
    point.truncate(n);
    for v in point.iter_mut() {
        if *v < 0.0 && *v >= -tol.lp {
            *v = 0.0;
        }
    }
    if lp.violation(&point) > tol.lp * lp.rhs_scale() {
        return Err(Error::NumericalFailure(
            "optimal point violates constraints",
        ));
    }
    let value = dot(&lp.objective, &point);
    Ok(LpOutcome::Optimal(LpSolution { value, point }))
}

/// All basic feasible solutions of `{x >= 0 : a x = b}`.
///
/// Every column subset of size `rank(a)` is tried; singular subsets are
/// skipped. Vertices closer than `tol.vertex` in the infinity norm are merged,
/// and the result is sorted in descending lexicographic order.
pub fn enumerate_vertices(a: &Matrix, b: &[f64], tol: &Tolerances) -> Result<Vec<Vec<f64>>> {
    if a.rows() == 0 || a.rows() != b.len() {
        return Err(Error::BadShape(
            "vertex enumeration needs a nonempty equality system",
        ));
    }
    let n = a.cols();
    let (rank, _) = rank_and_nullity(a, tol.rank);
    let scale = 1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let resid_tol = tol.lp * scale;

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut consider = |x: Vec<f64>| {
        if !vertices
            .iter()
            .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= tol.vertex))
        {
            vertices.push(x);
        }
    };

    if rank == 0 {
        if b.iter().all(|v| v.abs() <= resid_tol) {
            consider(vec![0.0; n]);
        }
    } else {
        let mut subset: Vec<usize> = (0..rank).collect();
        loop {
            let sub = a.select_columns(&subset);
            if let Some(xs) = solve_full_column_rank(&sub, b, tol.rank, resid_tol) {
                if xs.iter().all(|&v| v >= -tol.lp) {
                    let mut x = vec![0.0; n];
                    for (&j, &v) in subset.iter().zip(&xs) {
                        x[j] = if v.abs() <= tol.lp { 0.0 } else { v };
                    }
                    let resid = a
                        .mul_vec(&x)
                        .iter()
                        .zip(b)
                        .map(|(l, r)| (l - r).abs())
                        .fold(0.0, f64::max);
                    if resid <= resid_tol {
                        consider(x);
                    }
                }
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }

    if vertices.is_empty() {
        return Err(Error::Infeasible);
    }
    vertices.sort_by(|p, q| lex_desc(p, q));
    Ok(vertices)
}

fn lex_desc(p: &[f64], q: &[f64]) -> Ordering {
    for (a, b) in p.iter().zip(q) {
        match b.total_cmp(a) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
