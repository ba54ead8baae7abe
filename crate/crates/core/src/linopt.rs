//! Dense linear programming: a two-phase tableau simplex (Dantzig pricing,
//! Harris ratio test, Bland fallback on stalls) and a cutting-plane driver
//! around separation oracles.
//!
//! Rows are scaled to unit max-coefficient before solving; [`FEAS_TOL`] is
//! the absolute feasibility tolerance on those normalized rows.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};

pub const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
/// Tableau entries below this are treated as cancellation residue.
const ZERO_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Self { coeffs, relation, rhs }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    /// Amount by which `x` violates the row, normalized by its largest coefficient.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let scale = self.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(1e-300);
        let lhs = self.activity(x);
        let raw = match self.relation {
            Relation::Le => lhs - self.rhs,
            Relation::Ge => self.rhs - lhs,
            Relation::Eq => (lhs - self.rhs).abs(),
        };
        raw.max(0.0) / scale
    }
}

/// `optimize objective . x` subject to rows and per-variable bounds.
///
/// Variables default to `[0, +inf)`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { sense, objective, constraints: Vec::new(), lower: vec![0.0; n], upper: vec![f64::INFINITY; n] }
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn width(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
        self
    }

    pub fn push(&mut self, c: Constraint) -> &mut Self {
        self.constraints.push(c);
        self
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.width();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::MalformedLp("bound vectors do not match objective width".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedLp("non-finite objective coefficient".into()));
        }
        for (k, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::MalformedLp(format!("row {k} has width {}, expected {n}", row.coeffs.len())));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedLp(format!("row {k} has a non-finite entry")));
            }
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY {
                return Err(Error::MalformedLp(format!("variable {j} has invalid bounds")));
            }
        }
        Ok(())
    }

    /// Plain-text dump, one row per line, for debugging.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        let _ = writeln!(out, "{sense} {}", join(&self.objective));
        for row in &self.constraints {
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, "row {} {rel} {}", join(&row.coeffs), row.rhs);
        }
        for j in 0..self.width() {
            let _ = writeln!(out, "bound x{j} [{}, {}]", self.lower[j], self.upper[j]);
        }
        out
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Sensitivity of the optimal value to each row's right-hand side.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Result<LpSolution> {
        match self {
            Self::Optimal(s) => Ok(s),
            Self::Infeasible => Err(Error::LpStatus("infeasible")),
            Self::Unbounded => Err(Error::LpStatus("unbounded")),
        }
    }
}

/// How an original variable is expressed through non-negative tableau columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + col`
    Shift { offset: f64, col: usize },
    /// `x = offset - col`
    Mirror { offset: f64, col: usize },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
    /// Index in the original LP and multiplier mapping tableau duals back to it.
    origin: Option<(usize, f64)>,
}

struct Tableau {
    width: usize,
    /// Row-major, `rows x width`; last column holds the right-hand side.
    a: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs; last entry is minus the objective value.
    cost: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let p = self.a[r * w + q];
        for v in &mut self.a[r * w..(r + 1) * w] {
            *v /= p;
        }
        let prow: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows() {
            if i == r {
                continue;
            }
            let f = self.a[i * w + q];
            if f != 0.0 {
                for (v, pv) in self.a[i * w..(i + 1) * w].iter_mut().zip(&prow) {
                    *v -= f * pv;
                    if v.abs() < ZERO_TOL {
                        *v = 0.0;
                    }
                }
                self.a[i * w + q] = 0.0;
            }
        }
        let f = self.cost[q];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.cost[q] = 0.0;
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Minimizes the current cost row over columns `< allowed`.
    ///
    /// Uses Dantzig pricing with a Harris two-pass ratio test, which prefers
    /// large pivot elements among near-tied rows. After a run of degenerate
    /// pivots it switches to Bland's rule (lowest improving column, lowest
    /// basic index among ratio ties) until the objective moves again, which
    /// rules out cycling.
    fn optimize(&mut self, allowed: usize, max_pivots: usize) -> Result<bool> {
        let stall_limit = 50 + self.rows();
        let mut stalled = 0;
        loop {
            let bland = stalled >= stall_limit;
            let entering = if bland {
                (0..allowed).find(|&j| self.cost[j] < -FEAS_TOL)
            } else {
                (0..allowed).filter(|&j| self.cost[j] < -FEAS_TOL).min_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]))
            };
            let Some(q) = entering else {
                return Ok(true);
            };
            let leaving = if bland { self.ratio_bland(q) } else { self.ratio_harris(q) };
            let Some(r) = leaving else {
                return Ok(false);
            };
            if self.pivots >= max_pivots {
                return Err(Error::LpStatus("beyond the pivot limit"));
            }
            let before = self.cost[self.width - 1];
            self.pivot(r, q);
            if (self.cost[self.width - 1] - before).abs() <= 1e-12 * (1.0 + before.abs()) {
                stalled += 1;
            } else {
                stalled = 0;
            }
        }
    }

    fn ratio_harris(&self, q: usize) -> Option<usize> {
        let mut bound = f64::INFINITY;
        for i in 0..self.rows() {
            let aiq = self.at(i, q);
            if aiq > PIVOT_TOL {
                bound = bound.min((self.rhs(i).max(0.0) + FEAS_TOL) / aiq);
            }
        }
        if bound == f64::INFINITY {
            return None;
        }
        let mut best: Option<usize> = None;
        for i in 0..self.rows() {
            let aiq = self.at(i, q);
            if aiq > PIVOT_TOL && self.rhs(i).max(0.0) / aiq <= bound {
                best = match best {
                    Some(b) if self.at(b, q) > aiq || (self.at(b, q) == aiq && self.basis[b] < self.basis[i]) => Some(b),
                    _ => Some(i),
                };
            }
        }
        best
    }

    fn ratio_bland(&self, q: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows() {
            let aiq = self.at(i, q);
            if aiq > PIVOT_TOL {
                let ratio = self.rhs(i).max(0.0) / aiq;
                best = match best {
                    Some((bi, br))
                        if ratio > br + 1e-12 * (1.0 + br)
                            || (ratio >= br - 1e-12 * (1.0 + br) && self.basis[bi] < self.basis[i]) =>
                    {
                        Some((bi, br))
                    }
                    _ => Some((i, ratio)),
                };
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Solves `lp` to an optimal vertex, or certifies infeasibility / unboundedness.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.width();

    // Columns for original variables.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        if lo > hi {
            return Ok(LpOutcome::Infeasible);
        }
        let m = if lo.is_finite() {
            if hi.is_finite() {
                bound_rows.push((ncols, hi - lo));
            }
            VarMap::Shift { offset: lo, col: ncols }
        } else if hi.is_finite() {
            VarMap::Mirror { offset: hi, col: ncols }
        } else {
            ncols += 1;
            VarMap::Split { pos: ncols - 1, neg: ncols }
        };
        ncols += 1;
        maps.push(m);
    }
    let nstruct = ncols;

    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; nstruct];
    for (j, m) in maps.iter().enumerate() {
        let c = sign * lp.objective[j];
        match *m {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Mirror { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    let mut rows = Vec::new();
    for (k, c) in lp.constraints.iter().enumerate() {
        let mut coeffs = vec![0.0; nstruct];
        let mut rhs = c.rhs;
        for (j, m) in maps.iter().enumerate() {
            let a = c.coeffs[j];
            if a == 0.0 {
                continue;
            }
            match *m {
                VarMap::Shift { offset, col } => {
                    coeffs[col] += a;
                    rhs -= a * offset;
                }
                VarMap::Mirror { offset, col } => {
                    coeffs[col] -= a;
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        let scale = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale == 0.0 {
            let ok = match c.relation {
                Relation::Le => rhs >= -FEAS_TOL,
                Relation::Ge => rhs <= FEAS_TOL,
                Relation::Eq => rhs.abs() <= FEAS_TOL,
            };
            if !ok {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        rows.push(Row { coeffs, relation: c.relation, rhs, origin: Some((k, 1.0 / scale)) });
        let row = rows.last_mut().unwrap();
        for a in &mut row.coeffs {
            *a /= scale;
        }
        row.rhs /= scale;
    }
    for &(col, ub) in &bound_rows {
        let mut coeffs = vec![0.0; nstruct];
        coeffs[col] = 1.0;
        rows.push(Row { coeffs, relation: Relation::Le, rhs: ub, origin: None });
    }
    for row in &mut rows {
        if row.rhs < 0.0 {
            row.coeffs.iter_mut().for_each(|a| *a = -*a);
            row.rhs = -row.rhs;
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            if let Some((_, mult)) = &mut row.origin {
                *mult = -*mult;
            }
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.relation != Relation::Le).count();
    let art_start = nstruct + n_slack;
    let total_cols = art_start + n_art;
    let width = total_cols + 1;
    let mut a = vec![0.0; m * width];
    let mut basis = vec![0; m];
    let mut init_col = vec![0; m];
    let (mut next_slack, mut next_art) = (nstruct, art_start);
    for (i, row) in rows.iter().enumerate() {
        let base = i * width;
        a[base..base + nstruct].copy_from_slice(&row.coeffs);
        a[base + width - 1] = row.rhs;
        match row.relation {
            Relation::Le => {
                a[base + next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                a[base + next_slack] = -1.0;
                next_slack += 1;
                a[base + next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                a[base + next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
        }
        init_col[i] = basis[i];
    }
    let max_pivots = 50_000 + 50 * (m + total_cols);
    let mut t = Tableau { width, a, basis, cost: vec![0.0; width], pivots: 0 };

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        for j in art_start..total_cols {
            t.cost[j] = 1.0;
        }
        for i in 0..m {
            if t.basis[i] >= art_start {
                for j in 0..width {
                    t.cost[j] -= t.at(i, j);
                }
            }
        }
        t.optimize(art_start, max_pivots)?;
        let infeasibility = -t.cost[width - 1];
        let rhs_scale = rows.iter().fold(1.0f64, |s, r| s.max(r.rhs));
        if infeasibility > FEAS_TOL * rhs_scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining (zero-level) artificials out where possible.
        for i in 0..m {
            if t.basis[i] >= art_start {
                if let Some(q) = (0..art_start).find(|&j| t.at(i, j).abs() > 1e-9) {
                    t.a[i * width + width - 1] = 0.0;
                    t.pivot(i, q);
                }
            }
        }
    }

    // Phase 2.
    let mut full_cost = vec![0.0; total_cols];
    full_cost[..nstruct].copy_from_slice(&cost);
    t.cost = vec![0.0; width];
    t.cost[..nstruct].copy_from_slice(&cost);
    for i in 0..m {
        let cb = full_cost[t.basis[i]];
        if cb != 0.0 {
            for j in 0..width {
                t.cost[j] -= cb * t.at(i, j);
            }
        }
    }
    if !t.optimize(art_start, max_pivots)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut cols = vec![0.0; total_cols];
    for i in 0..m {
        cols[t.basis[i]] = t.rhs(i).max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { offset, col } => offset + cols[col],
            VarMap::Mirror { offset, col } => offset - cols[col],
            VarMap::Split { pos, neg } => cols[pos] - cols[neg],
        })
        .collect();
    let value = lp.objective_value(&x);

    let mut duals = vec![0.0; lp.constraints.len()];
    for (r, row) in rows.iter().enumerate() {
        if let Some((k, mult)) = row.origin {
            let y: f64 = (0..m).map(|i| full_cost[t.basis[i]] * t.at(i, init_col[r])).sum();
            duals[k] = sign * mult * y;
        }
    }
    Ok(LpOutcome::Optimal(LpSolution { x, value, duals, pivots: t.pivots }))
}

/// A violated row found by a separation oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub constraint: Constraint,
    pub witness: Option<Coalition>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    Feasible,
    Violated(Cut),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutOutcome {
    Optimal { solution: LpSolution, rounds: usize, cuts: Vec<Cut> },
    Infeasible { rounds: usize },
    Unbounded { rounds: usize },
}

/// Cutting-plane loop: solve, ask the oracle about the optimum, add the
/// violated row, repeat. With an exact oracle the final value is optimal
/// for the implicit full LP. Running out of rounds is [`Error::RoundLimit`].
pub fn solve_with_cuts<F>(base: &LinearProgram, mut oracle: F, max_rounds: usize) -> Result<CutOutcome>
where
    F: FnMut(&LpSolution) -> Result<Separation>,
{
    let mut lp = base.clone();
    let mut cuts = Vec::new();
    for round in 1..=max_rounds {
        let solution = match solve_lp(&lp)? {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible => return Ok(CutOutcome::Infeasible { rounds: round }),
            LpOutcome::Unbounded => return Ok(CutOutcome::Unbounded { rounds: round }),
        };
        match oracle(&solution)? {
            Separation::Feasible => return Ok(CutOutcome::Optimal { solution, rounds: round, cuts }),
            Separation::Violated(cut) => {
                let slack = cut.constraint.violation(&solution.x);
                if slack <= FEAS_TOL {
                    return Err(Error::InvalidCut { slack });
                }
                lp.push(cut.constraint.clone());
                cuts.push(cut);
            }
        }
    }
    Err(Error::RoundLimit { rounds: max_rounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opt(lp: &LinearProgram) -> LpSolution {
        solve_lp(lp).unwrap().optimal().unwrap()
    }

    #[test]
    fn least_core_toy() {
        // min eps: x1 + x2 = 1.5, x1 >= 1 - eps, x2 >= 1 - eps
        let mut lp = LinearProgram::minimize(vec![0.0, 0.0, 1.0]);
        lp.add(vec![1.0, 1.0, 0.0], Relation::Eq, 1.5);
        lp.add(vec![1.0, 0.0, 1.0], Relation::Ge, 1.0);
        lp.add(vec![0.0, 1.0, 1.0], Relation::Ge, 1.0);
        let s = opt(&lp);
        assert!((s.value - 0.25).abs() < 1e-9);
        assert!((s.x[0] - 0.75).abs() < 1e-9 && (s.x[1] - 0.75).abs() < 1e-9);
    }

    #[test]
    fn simple_max_and_infeasible() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, 3.0);
        assert!((opt(&lp).value - 3.0).abs() < 1e-12);

        let mut bad = LinearProgram::minimize(vec![0.0]);
        bad.add(vec![1.0], Relation::Ge, 1.0);
        bad.add(vec![1.0], Relation::Le, 0.0);
        assert_eq!(solve_lp(&bad).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_is_reported() {
        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.add(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn bounds_free_and_mirrored_variables() {
        // min x0 + x1 with x0 free, x0 >= -2 via row; x1 <= 4 upper only, x1 >= -1 row
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, f64::NEG_INFINITY, 4.0);
        lp.add(vec![1.0, 0.0], Relation::Ge, -2.0);
        lp.add(vec![0.0, 1.0], Relation::Ge, -1.0);
        let s = opt(&lp);
        assert!((s.value + 3.0).abs() < 1e-9, "{s:?}");

        let mut boxed = LinearProgram::maximize(vec![1.0, 2.0]);
        boxed.set_bounds(0, 1.0, 2.0).set_bounds(1, -1.0, 0.5);
        boxed.add(vec![1.0, 1.0], Relation::Le, 10.0);
        let s = opt(&boxed);
        assert!((s.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.add(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.add(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = opt(&lp);
        assert!((s.value + 0.05).abs() < 1e-9, "{}", s.value);
    }

    #[test]
    fn duals_certify_optimality() {
        let mut lp = LinearProgram::minimize(vec![2.0, 3.0, 1.0]);
        lp.add(vec![1.0, 1.0, 1.0], Relation::Ge, 4.0);
        lp.add(vec![1.0, 2.0, 0.0], Relation::Ge, 3.0);
        lp.add(vec![0.0, 1.0, 3.0], Relation::Le, 9.0);
        lp.add(vec![1.0, 0.0, 1.0], Relation::Eq, 3.0);
        let s = opt(&lp);
        let dual_obj: f64 = s.duals.iter().zip(&lp.constraints).map(|(y, c)| y * c.rhs).sum();
        assert!((dual_obj - s.value).abs() < 1e-9, "{dual_obj} vs {}", s.value);
    }

    #[test]
    fn zero_rows_are_checked_directly() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.add(vec![0.0], Relation::Ge, 1.0);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);
        let mut ok = LinearProgram::minimize(vec![1.0]);
        ok.add(vec![0.0], Relation::Le, 1.0);
        assert_eq!(opt(&ok).value, 0.0);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.add(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::MalformedLp(_))));
    }

    #[test]
    fn cuts_with_trivial_oracle_take_one_round() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, 3.0);
        match solve_with_cuts(&lp, |_| Ok(Separation::Feasible), 5).unwrap() {
            CutOutcome::Optimal { solution, rounds, .. } => {
                assert_eq!(rounds, 1);
                assert_eq!(solution.value, 3.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_violating_cut_is_rejected_and_round_limit_reported() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, 3.0);
        let lazy = |_: &LpSolution| {
            Ok(Separation::Violated(Cut { constraint: Constraint::new(vec![1.0], Relation::Le, 5.0), witness: None }))
        };
        assert!(matches!(solve_with_cuts(&lp, lazy, 5), Err(Error::InvalidCut { .. })));

        let mut cap = 3.0;
        let shrinking = move |s: &LpSolution| {
            cap -= 0.5;
            let _ = s;
            Ok(Separation::Violated(Cut { constraint: Constraint::new(vec![1.0], Relation::Le, cap), witness: None }))
        };
        assert_eq!(solve_with_cuts(&lp, shrinking, 3), Err(Error::RoundLimit { rounds: 3 }));
    }
}
