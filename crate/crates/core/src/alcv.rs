//! Absolute least-core value.
//!
//! `alcv_exact` solves the full LP over successful coalitions. The
//! approximation combines two surrogate programs:
//!
//! * the *strengthened* program drops truncation (`x(S) >= sigma(S) - eps`
//!   for every `S`); it is solved by cut generation with double greedy as a
//!   1/3-approximate separation oracle, and the relaxed optimum is tripled;
//! * the *relaxed* program lowers every successful coalition's profit to
//!   `eta`; it is bracketed by a ladder of feasibility programs
//!   `x(S) >= k delta` whose separation uses a knapsack-style DP over a
//!   discretized allocation.
//!
//! The reported value is `min(eps_re + sigma(V) - eta, eps_str)`.

use serde::Serialize;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{Allocation, TruncatedGame, MAX_TABLE_PLAYERS};
use crate::linopt::{self, Constraint, Cut, CutOutcome, LinearProgram, Relation, Separation};

pub const DEFAULT_MAX_ROUNDS: usize = 10_000;
const SEP_TOL: f64 = 1e-8;
const TIGHT_TOL: f64 = 1e-7;

/// Variables `(x_0..x_{n-1}, eps)`: minimize `eps`, `x(V) = sigma(V)`, `eps >= 0`.
fn eps_lp(n: usize, top: f64) -> LinearProgram {
    let mut objective = vec![0.0; n];
    objective.push(1.0);
    let mut lp = LinearProgram::minimize(objective);
    let mut budget = vec![1.0; n];
    budget.push(0.0);
    lp.add(budget, Relation::Eq, top);
    lp
}

/// `x(S) + eps >= value`.
fn eps_row(s: Coalition, value: f64) -> Constraint {
    let mut coeffs = s.indicator();
    coeffs.push(1.0);
    Constraint::new(coeffs, Relation::Ge, value)
}

fn game_for_enumeration(game: &TruncatedGame) -> Result<std::borrow::Cow<'_, TruncatedGame>> {
    Ok(if game.n() <= MAX_TABLE_PLAYERS && game.oracle().is_exact() {
        std::borrow::Cow::Borrowed(game)
    } else if game.n() <= MAX_TABLE_PLAYERS {
        std::borrow::Cow::Owned(game.tabulated()?)
    } else {
        std::borrow::Cow::Borrowed(game)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlcvExact {
    pub eps: f64,
    pub x: Allocation,
    pub tight_coalitions: Vec<Coalition>,
}

/// Exact ALCV: `min eps` with `x(S) >= sigma(S) - eps` for every successful `S`.
pub fn alcv_exact(game: &TruncatedGame) -> Result<AlcvExact> {
    game.require_table_size("alcv exact", MAX_TABLE_PLAYERS)?;
    let n = game.n();
    let table = game.tabulate()?;
    let mut lp = eps_lp(n, table[table.len() - 1]);
    let mut rows = Vec::new();
    for s in Coalition::all(n) {
        let v = table[s.index()];
        if v > 0.0 && game.reaches_eta(v) {
            lp.push(eps_row(s, v));
            rows.push((s, v));
        }
    }
    let sol = linopt::solve_lp(&lp)?.optimal()?;
    let eps = sol.x[n].max(0.0);
    let x = Allocation::from_solver(sol.x[..n].to_vec());
    let tight_coalitions = rows
        .iter()
        .filter(|(s, v)| (s.total(&x) + eps - v).abs() <= TIGHT_TOL * v.max(1.0))
        .map(|(s, _)| *s)
        .collect();
    Ok(AlcvExact { eps, x, tight_coalitions })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreedyOutcome {
    pub set: Coalition,
    pub value: f64,
    pub evaluations: usize,
}

/// Deterministic double greedy for unconstrained submodular maximization.
///
/// Walks players in index order keeping a growing `X` and a shrinking `Y`;
/// player `i` joins `X` when its gain for `X` is at least its loss for `Y`.
/// Returns `g(S) >= (g(OPT) + g(empty) + g(V)) / 3`, hence at least `OPT / 3`
/// when `g(empty), g(V) >= 0`. Uses exactly `2n` oracle calls.
pub fn double_greedy_max<E, F>(n: usize, mut g: F) -> std::result::Result<GreedyOutcome, E>
where
    F: FnMut(Coalition) -> std::result::Result<f64, E>,
{
    let mut lo = Coalition::empty(n);
    let mut hi = Coalition::grand(n);
    if n == 0 {
        let value = g(lo)?;
        return Ok(GreedyOutcome { set: lo, value, evaluations: 1 });
    }
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;
    let mut evaluations = 2;
    for i in 0..n {
        // On the last player lo + i == hi and hi - i == lo.
        let (g_add, g_drop) = if i + 1 == n {
            (g_hi, g_lo)
        } else {
            evaluations += 2;
            (g(lo.with(i))?, g(hi.without(i))?)
        };
        let gain = g_add - g_lo;
        let loss = g_drop - g_hi;
        if gain >= loss {
            lo = lo.with(i);
            g_lo = g_add;
        } else {
            hi = hi.without(i);
            g_hi = g_drop;
        }
    }
    debug_assert_eq!(lo, hi);
    Ok(GreedyOutcome { set: lo, value: g_lo, evaluations })
}

/// Approximate x-maximum dissatisfaction: double greedy on `sigma(S) - x(S)`.
pub fn x_md_value(game: &TruncatedGame, x: &[f64]) -> Result<GreedyOutcome> {
    game.check_allocation_len(x)?;
    double_greedy_max(game.n(), |s| Ok(game.sigma(s)? - s.total(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrApprox {
    /// `3 * eps_relaxed`; satisfies `eps*_s <= eps_str <= 3 eps*_s`.
    pub eps_str: f64,
    pub eps_relaxed: f64,
    pub x: Allocation,
    pub rounds: usize,
}

/// Strengthened program (`x(S) >= sigma(S) - eps` for all `S`) by cut
/// generation with [`x_md_value`] as separation.
pub fn lp_str_approx(game: &TruncatedGame, max_rounds: usize) -> Result<StrApprox> {
    let game = game_for_enumeration(game)?;
    let n = game.n();
    let lp = eps_lp(n, game.grand_value()?);
    let outcome = linopt::solve_with_cuts(
        &lp,
        |sol| {
            let eps = sol.x[n];
            let found = x_md_value(&game, &sol.x[..n])?;
            if found.value > eps + SEP_TOL {
                let v = game.sigma(found.set)?;
                Ok(Separation::Violated(Cut { constraint: eps_row(found.set, v), witness: Some(found.set) }))
            } else {
                Ok(Separation::Feasible)
            }
        },
        max_rounds,
    )?;
    match outcome {
        CutOutcome::Optimal { solution, rounds, .. } => {
            let eps_relaxed = solution.x[n].max(0.0);
            Ok(StrApprox {
                eps_str: 3.0 * eps_relaxed,
                eps_relaxed,
                x: Allocation::from_solver(solution.x[..n].to_vec()),
                rounds,
            })
        }
        CutOutcome::Infeasible { .. } => Err(Error::LpStatus("infeasible")),
        CutOutcome::Unbounded { .. } => Err(Error::LpStatus("unbounded")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "coalition")]
pub enum LfpVerdict {
    /// No successful coalition receives less than `k delta`.
    FeasibleForK,
    /// A successful coalition with `x(S) < k delta`, checked against the undiscretized `x`.
    Violated(Coalition),
    /// The DP found no violation; `x` is taken as feasible for the `k - 1` program.
    FeasibleForKMinus1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictSource {
    Dp,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LfpOracleOutcome {
    pub verdict: LfpVerdict,
    pub source: VerdictSource,
}

/// Knapsack-style table over a discretized allocation.
///
/// `value[j][l]` is the best sum of prefix marginals
/// `sigma({0..j}) - sigma({0..j-1})` over `S` within players `0..=j` whose
/// discretized payoff is `l` grid cells; `-inf` when unreachable.
#[derive(Debug, Clone)]
pub struct LfpTable {
    pub cells: Vec<u64>,
    pub value: Vec<Vec<f64>>,
    take: Vec<Vec<bool>>,
}

impl LfpTable {
    /// Builds the table for `l in 0..width`, grid step `cell`.
    pub fn build(game: &TruncatedGame, x: &[f64], cell: f64, width: usize) -> Result<Self> {
        let n = game.n();
        let cells: Vec<u64> = x.iter().map(|v| (v.max(0.0) / cell).floor() as u64).collect();
        let mut prev = vec![f64::NEG_INFINITY; width];
        if width > 0 {
            prev[0] = 0.0;
        }
        let mut value = Vec::with_capacity(n);
        let mut take = Vec::with_capacity(n);
        let mut prefix = game.empty();
        let mut prefix_value = 0.0;
        for j in 0..n {
            prefix = prefix.with(j);
            let next_value = game.sigma(prefix)?;
            let marginal = next_value - prefix_value;
            prefix_value = next_value;
            let mut row = prev.clone();
            let mut took = vec![false; width];
            let q = cells[j];
            for l in (q as usize)..width {
                let cand = prev[l - q as usize] + marginal;
                if cand > row[l] {
                    row[l] = cand;
                    took[l] = true;
                }
            }
            value.push(row.clone());
            take.push(took);
            prev = row;
        }
        Ok(Self { cells, value, take })
    }

    /// Coalition realizing `value[n-1][l]`.
    pub fn extract(&self, n: usize, mut l: usize) -> Coalition {
        let mut s = Coalition::empty(n);
        for j in (0..n).rev() {
            if self.take[j][l] {
                s = s.with(j);
                l -= self.cells[j] as usize;
            }
        }
        s
    }
}

fn exhaustive_lfp(game: &TruncatedGame, x: &[f64], bar: f64) -> Result<LfpVerdict> {
    for s in Coalition::all(game.n()) {
        if !s.is_empty() && s.total(x) < bar - SEP_TOL && game.is_successful(s)? {
            return Ok(LfpVerdict::Violated(s));
        }
    }
    Ok(LfpVerdict::FeasibleForK)
}

/// Partial separation oracle for `x(S) >= k delta` over successful `S`.
///
/// Discretizes `x` to a grid of `delta / m_disc`, runs the DP over payoffs
/// below `k delta`, and re-checks any hit against the true oracle. When the
/// hit does not survive re-checking, or the DP finds nothing and
/// `exact_fallback` is set, falls back to enumeration (`n <= 20`).
pub fn lfp_partial_oracle(
    game: &TruncatedGame,
    x: &[f64],
    k: usize,
    delta: f64,
    m_disc: usize,
    exact_fallback: bool,
) -> Result<LfpOracleOutcome> {
    game.check_allocation_len(x)?;
    if !(delta > 0.0) || m_disc == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!("need delta > 0, m_disc >= 1, k >= 1 (got {delta}, {m_disc}, {k})")));
    }
    let n = game.n();
    let bar = k as f64 * delta;
    let cell = delta / m_disc as f64;
    let width = k * m_disc;
    let table = LfpTable::build(game, x, cell, width)?;
    let last = &table.value[n - 1];
    let hit = (0..width).find(|&l| last[l] > f64::NEG_INFINITY && game.reaches_eta(last[l]));
    let can_enumerate = n <= MAX_TABLE_PLAYERS;
    match hit {
        Some(l) => {
            let s = table.extract(n, l);
            if !s.is_empty() && s.total(x) < bar - SEP_TOL && game.is_successful(s)? {
                return Ok(LfpOracleOutcome { verdict: LfpVerdict::Violated(s), source: VerdictSource::Dp });
            }
            if can_enumerate {
                let verdict = exhaustive_lfp(game, x, bar)?;
                return Ok(LfpOracleOutcome { verdict, source: VerdictSource::Exhaustive });
            }
        }
        None if exact_fallback && can_enumerate => {
            let verdict = exhaustive_lfp(game, x, bar)?;
            return Ok(LfpOracleOutcome { verdict, source: VerdictSource::Exhaustive });
        }
        None => {}
    }
    Ok(LfpOracleOutcome { verdict: LfpVerdict::FeasibleForKMinus1, source: VerdictSource::Dp })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReOptions {
    /// Grid refinement `M` in `delta' = delta / M`; defaults to `n`.
    pub m_disc: Option<usize>,
    /// Enumerate when the DP reports no violation (`n <= 20`).
    pub exact_fallback: bool,
    pub max_rounds: usize,
}

impl Default for ReOptions {
    fn default() -> Self {
        Self { m_disc: None, exact_fallback: true, max_rounds: DEFAULT_MAX_ROUNDS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct LfpStats {
    pub programs: usize,
    pub rounds: usize,
    pub dp_verdicts: usize,
    pub exhaustive_verdicts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReApprox {
    /// `max(0, eta - k' delta)`; satisfies `eps*_r <= eps_re <= eps*_r + 2 delta`.
    pub eps_re: f64,
    pub k_prime: usize,
    pub x: Allocation,
    pub stats: LfpStats,
}

/// Relaxed program (successful coalitions need only `eta - eps`) via the
/// feasibility ladder `x(S) >= k delta`, `k = 1..ceil(eta / delta)`.
pub fn lp_re_solve(game: &TruncatedGame, delta: f64, opts: &ReOptions) -> Result<ReApprox> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let game = game_for_enumeration(game)?;
    let n = game.n();
    let top = game.grand_value()?;
    let eta = game.eta();
    let mut best_x = Allocation::uniform(n, top);
    let mut stats = LfpStats::default();
    if eta <= 0.0 {
        return Ok(ReApprox { eps_re: 0.0, k_prime: 0, x: best_x, stats });
    }
    let m_disc = opts.m_disc.unwrap_or(n);
    let steps = (eta / delta).ceil() as usize;

    // max alpha s.t. x(S) >= alpha over discovered S, alpha <= k delta
    let mut objective = vec![0.0; n];
    objective.push(1.0);
    let mut lp = LinearProgram::maximize(objective);
    let mut budget = vec![1.0; n];
    budget.push(0.0);
    lp.add(budget, Relation::Eq, top);
    let alpha_row = |s: Coalition| {
        let mut coeffs = s.indicator();
        coeffs.push(-1.0);
        Constraint::new(coeffs, Relation::Ge, 0.0)
    };
    lp.push(alpha_row(game.grand()));

    let mut k_prime = 0;
    for k in 1..=steps {
        let bar = k as f64 * delta;
        lp.set_bounds(n, 0.0, bar);
        #[derive(PartialEq)]
        enum Stop {
            Running,
            Infeasible,
            Feasible,
            Fallback,
        }
        let mut stop = Stop::Running;
        let outcome = linopt::solve_with_cuts(
            &lp,
            |sol| {
                if sol.x[n] < bar - 1e-10 * bar.max(1.0) {
                    stop = Stop::Infeasible;
                    return Ok(Separation::Feasible);
                }
                let res = lfp_partial_oracle(&game, &sol.x[..n], k, delta, m_disc, opts.exact_fallback)?;
                match res.source {
                    VerdictSource::Dp => stats.dp_verdicts += 1,
                    VerdictSource::Exhaustive => stats.exhaustive_verdicts += 1,
                }
                Ok(match res.verdict {
                    LfpVerdict::Violated(s) => Separation::Violated(Cut { constraint: alpha_row(s), witness: Some(s) }),
                    LfpVerdict::FeasibleForK => {
                        stop = Stop::Feasible;
                        Separation::Feasible
                    }
                    LfpVerdict::FeasibleForKMinus1 => {
                        stop = Stop::Fallback;
                        Separation::Feasible
                    }
                })
            },
            opts.max_rounds,
        )?;
        stats.programs += 1;
        let CutOutcome::Optimal { solution, rounds, cuts } = outcome else {
            return Err(Error::LpStatus("feasibility ladder LP is not solvable"));
        };
        stats.rounds += rounds;
        for cut in cuts {
            lp.push(cut.constraint);
        }
        match stop {
            Stop::Feasible => {
                k_prime = k;
                best_x = Allocation::from_solver(solution.x[..n].to_vec());
            }
            Stop::Fallback => {
                k_prime = k - 1;
                best_x = Allocation::from_solver(solution.x[..n].to_vec());
                break;
            }
            Stop::Infeasible | Stop::Running => break,
        }
    }
    let eps_re = (eta - k_prime as f64 * delta).max(0.0);
    Ok(ReApprox { eps_re, k_prime, x: best_x, stats })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxBranch {
    Relaxed,
    Strengthened,
}

pub const ALCV_GUARANTEE: &str =
    "eps_p* <= eps_prime <= min(eps_p* + sigma(V) - eta + 2*delta, max(3*eps_p*, eta))";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlcvApproxResult {
    pub eps_prime: f64,
    pub eps_str: f64,
    pub eps_re: f64,
    pub delta: f64,
    pub x: Allocation,
    pub branch: ApproxBranch,
    pub guarantee: &'static str,
    pub str_rounds: usize,
    pub re_stats: LfpStats,
}

/// `min(eps_re + sigma(V) - eta, eps_str)`.
pub fn alcv_approx(game: &TruncatedGame, delta: f64, opts: &ReOptions) -> Result<AlcvApproxResult> {
    let top = game.grand_value()?;
    let re = lp_re_solve(game, delta, opts)?;
    let st = lp_str_approx(game, opts.max_rounds)?;
    let via_re = re.eps_re + (top - game.eta()).max(0.0);
    let (eps_prime, x, branch) = if via_re <= st.eps_str {
        (via_re, re.x, ApproxBranch::Relaxed)
    } else {
        (st.eps_str, st.x, ApproxBranch::Strengthened)
    };
    Ok(AlcvApproxResult {
        eps_prime,
        eps_str: st.eps_str,
        eps_re: re.eps_re,
        delta,
        x,
        branch,
        guarantee: ALCV_GUARANTEE,
        str_rounds: st.rounds,
        re_stats: re.stats,
    })
}
