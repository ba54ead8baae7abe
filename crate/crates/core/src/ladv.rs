//! Least average dissatisfaction value.
//!
//! `F(x) = 2^-n * sum_S max(f(S) - x(S), 0)` is convex and piecewise linear
//! on the budget simplex `D = {x >= 0, x(V) = sigma(V)}`. `ladv_exact`
//! minimizes it with an epigraph cutting-plane LP; `sgd_ladv` runs projected
//! stochastic subgradient descent with one uniformly drawn coalition per step.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{Allocation, TruncatedGame, MAX_TABLE_PLAYERS};
use crate::linopt::{self, Constraint, Cut, CutOutcome, LinearProgram, Relation, Separation};

pub const MAX_EXACT_LADV_PLAYERS: usize = 12;
/// Largest `n` for which iterates are scored by exact enumeration.
pub const EXACT_SCORING_PLAYERS: usize = 12;
/// Coalitions in the fixed sample used for scoring above [`EXACT_SCORING_PLAYERS`].
pub const SCORING_SAMPLES: usize = 10_000;
const CHUNK: usize = 4096;

/// Truncated profits of all coalitions plus the list of successful ones.
#[derive(Debug, Clone)]
pub struct ProfitTable {
    n: usize,
    profit: Vec<f64>,
}

impl ProfitTable {
    pub fn new(game: &TruncatedGame) -> Result<Self> {
        game.require_table_size("profit table", MAX_TABLE_PLAYERS)?;
        let sigma = game.tabulate()?;
        let profit = sigma.into_iter().map(|v| if game.reaches_eta(v) { v } else { 0.0 }).collect();
        Ok(Self { n: game.n(), profit })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn profit(&self, s: Coalition) -> f64 {
        self.profit[s.index()]
    }

    /// Exact `F(x)`.
    pub fn average_dissatisfaction(&self, x: &[f64]) -> f64 {
        let size = self.profit.len();
        let mut payoff = vec![0.0; size];
        let mut sum = 0.0;
        for bits in 1..size {
            let low = bits.trailing_zeros() as usize;
            payoff[bits] = payoff[bits & (bits - 1)] + x[low];
            let gap = self.profit[bits] - payoff[bits];
            if gap > 0.0 {
                sum += gap;
            }
        }
        sum / size as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// `None` for exact evaluation.
    pub std_error: Option<f64>,
}

/// `F(x)`: exact for `n <= 20`, otherwise a seeded sample mean over
/// [`SCORING_SAMPLES`] uniform coalitions with its standard error.
pub fn f_eval(game: &TruncatedGame, x: &[f64]) -> Result<Estimate> {
    game.check_allocation_len(x)?;
    if game.n() <= MAX_TABLE_PLAYERS {
        let value = ProfitTable::new(game)?.average_dissatisfaction(x);
        return Ok(Estimate { value, std_error: None });
    }
    let sample = CoalitionSample::draw(game, SCORING_SAMPLES, 0)?;
    Ok(sample.estimate(x))
}

/// Fixed coalition sample with cached truncated profits.
#[derive(Debug, Clone)]
struct CoalitionSample {
    sets: Vec<(Coalition, f64)>,
}

impl CoalitionSample {
    fn draw(game: &TruncatedGame, count: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = game.n();
        let sets: Vec<Coalition> = (0..count).map(|_| random_coalition(&mut rng, n)).collect();
        let sets = sets
            .into_par_iter()
            .map(|s| Ok((s, game.truncated_profit(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sets })
    }

    fn estimate(&self, x: &[f64]) -> Estimate {
        let k = self.sets.len() as f64;
        let gaps: Vec<f64> = self.sets.iter().map(|(s, f)| (f - s.total(x)).max(0.0)).collect();
        let mean = gaps.iter().sum::<f64>() / k;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
        Estimate { value: mean, std_error: Some((var / k).sqrt()) }
    }
}

fn random_coalition(rng: &mut impl RngCore, n: usize) -> Coalition {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    Coalition::from_bits(n, rng.next_u64() & mask).expect("masked to width")
}

/// Euclidean projection onto `{x >= 0, sum x = total}` by sorting.
pub fn project_to_budget_simplex(y: &[f64], total: f64) -> Result<Allocation> {
    if !(total >= 0.0 && total.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("projection needs finite input and total >= 0 (total = {total})")));
    }
    if y.is_empty() {
        return Ok(Allocation(Vec::new()));
    }
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        prefix += uj;
        let cand = (prefix - total) / (j + 1) as f64;
        if uj - cand > 0.0 {
            theta = cand;
        }
    }
    Ok(Allocation(y.iter().map(|v| (v - theta).max(0.0)).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SgdConfig {
    pub t: u64,
    pub alpha: f64,
    pub master_seed: u64,
    pub record_trace: bool,
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::InvalidParameter("T must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Step size `sqrt(sigma(V)^4 / (T n^4))`.
    pub fn theorem8_alpha(top: f64, n: usize, t: u64) -> f64 {
        (top.powi(4) / (t as f64 * (n as f64).powi(4))).sqrt()
    }

    /// Iteration count `sigma(V)^4 n^4 / eps^2` (as a float; usually huge).
    pub fn theorem8_iterations(top: f64, n: usize, epsilon: f64) -> f64 {
        (top.powi(4) * (n as f64).powi(4) / (epsilon * epsilon)).ceil()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LadvMethod {
    Exact,
    Sgd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub objective: f64,
    pub step_norm: f64,
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("iteration,objective,step_norm\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.iteration, r.objective, r.step_norm));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadvResult {
    pub value: f64,
    pub x: Allocation,
    pub method: LadvMethod,
    /// Standard error when iterates were scored on a coalition sample.
    pub std_error: Option<f64>,
    /// SGD: index of the best iterate (1-based); exact: cut rounds.
    pub iterations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

enum Scorer {
    Exact(ProfitTable),
    Sampled(CoalitionSample),
}

impl Scorer {
    fn score(&self, x: &[f64]) -> Estimate {
        match self {
            Scorer::Exact(t) => Estimate { value: t.average_dissatisfaction(x), std_error: None },
            Scorer::Sampled(s) => s.estimate(x),
        }
    }
}

/// Projected stochastic subgradient descent from the uniform allocation.
///
/// Step `t` draws `S` uniformly; if `f(S) >= x(S)` every member of `S` gains
/// `alpha`, then `x` is projected back onto `D`. Returns the best of the
/// `T + 1` iterates `X^1..X^{T+1}` under `F`.
pub fn sgd_ladv(game: &TruncatedGame, cfg: &SgdConfig) -> Result<LadvResult> {
    cfg.validate()?;
    let n = game.n();
    let top = game.grand_value()?;
    let table = if n <= MAX_TABLE_PLAYERS { Some(ProfitTable::new(game)?) } else { None };
    let scorer = match &table {
        Some(t) if n <= EXACT_SCORING_PLAYERS => Scorer::Exact(t.clone()),
        _ => Scorer::Sampled(CoalitionSample::draw(game, SCORING_SAMPLES, cfg.master_seed ^ 0x5eed)?),
    };
    let profit = |s: Coalition| -> Result<f64> {
        match &table {
            Some(t) => Ok(t.profit(s)),
            None => game.truncated_profit(s),
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    let mut x = Allocation::uniform(n, top).0;
    let mut best: Option<(u64, Estimate, Vec<f64>)> = None;
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut chunk: Vec<(u64, Vec<f64>, f64)> = Vec::with_capacity(CHUNK);
    let mut flush = |chunk: &mut Vec<(u64, Vec<f64>, f64)>, trace: &mut Option<Vec<TraceRow>>| {
        let scores: Vec<Estimate> = chunk.par_iter().map(|(_, it, _)| scorer.score(it)).collect();
        for ((iteration, it, step_norm), est) in chunk.drain(..).zip(scores) {
            if best.as_ref().is_none_or(|(_, b, _)| est.value < b.value) {
                best = Some((iteration, est, it));
            }
            if let Some(rows) = trace.as_mut() {
                rows.push(TraceRow { iteration, objective: est.value, step_norm });
            }
        }
    };

    chunk.push((1, x.clone(), 0.0));
    for t in 1..=cfg.t {
        let s = random_coalition(&mut rng, n);
        let step_norm = if !s.is_empty() && profit(s)? >= s.total(&x) {
            let mut half = x.clone();
            for i in s.members() {
                half[i] += cfg.alpha;
            }
            let next = project_to_budget_simplex(&half, top)?.0;
            let norm = next.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            x = next;
            norm
        } else {
            0.0
        };
        chunk.push((t + 1, x.clone(), step_norm));
        if chunk.len() == CHUNK {
            flush(&mut chunk, &mut trace);
        }
    }
    flush(&mut chunk, &mut trace);
    let (iteration, est, x) = best.expect("at least one iterate");
    Ok(LadvResult {
        value: est.value,
        x: Allocation(x),
        method: LadvMethod::Sgd,
        std_error: est.std_error,
        iterations: iteration,
        trace,
    })
}

/// Exact LADV (`n <= 12`) by cutting planes on the epigraph of `F`.
///
/// Each cut is `t >= 2^-n * sum_{S in Y} (f(S) - x(S))` for the set `Y` of
/// coalitions with positive shortfall at the current point; finitely many
/// such sets exist, so the loop terminates at the exact optimum.
pub fn ladv_exact(game: &TruncatedGame) -> Result<LadvResult> {
    game.require_table_size("ladv exact", MAX_EXACT_LADV_PLAYERS)?;
    let n = game.n();
    let table = ProfitTable::new(game)?;
    let top = game.grand_value()?;
    let scale = 1.0 / (1u64 << n) as f64;

    let mut objective = vec![0.0; n];
    objective.push(1.0);
    let mut lp = LinearProgram::minimize(objective);
    let mut budget = vec![1.0; n];
    budget.push(0.0);
    lp.add(budget, Relation::Eq, top);

    let outcome = linopt::solve_with_cuts(
        &lp,
        |sol| {
            let x = &sol.x[..n];
            let mut coeffs = vec![0.0; n + 1];
            let mut rhs = 0.0;
            let mut value = 0.0;
            for s in Coalition::all(n) {
                let gap = table.profit(s) - s.total(x);
                if gap > 0.0 {
                    value += gap;
                    rhs += table.profit(s);
                    for i in s.members() {
                        coeffs[i] += scale;
                    }
                }
            }
            value *= scale;
            rhs *= scale;
            coeffs[n] = 1.0;
            if value > sol.x[n] + 1e-10 * top.max(1.0) {
                Ok(Separation::Violated(Cut { constraint: Constraint::new(coeffs, Relation::Ge, rhs), witness: None }))
            } else {
                Ok(Separation::Feasible)
            }
        },
        100_000,
    )?;
    match outcome {
        CutOutcome::Optimal { solution, rounds, .. } => {
            let x = Allocation::from_solver(solution.x[..n].to_vec());
            let value = table.average_dissatisfaction(&x);
            Ok(LadvResult { value, x, method: LadvMethod::Exact, std_error: None, iterations: rounds as u64, trace: None })
        }
        CutOutcome::Infeasible { .. } => Err(Error::LpStatus("infeasible")),
        CutOutcome::Unbounded { .. } => Err(Error::LpStatus("unbounded")),
    }
}

/// Draws a uniform point of `D` (flat Dirichlet) scaled to `total`.
pub fn random_budget_point(rng: &mut impl Rng, n: usize, total: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let sum: f64 = w.iter().sum();
    w.iter().map(|v| v / sum * total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ProfitOracle;

    fn empty_core() -> TruncatedGame {
        TruncatedGame::new(ProfitOracle::table(vec![0.0, 1.0, 1.0, 1.5]).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn f_eval_hand_sums() {
        let g = empty_core();
        assert!((f_eval(&g, &[0.75, 0.75]).unwrap().value - 0.125).abs() < 1e-15);
        assert!((f_eval(&g, &[1.5, 0.0]).unwrap().value - 0.25).abs() < 1e-15);
        let add = TruncatedGame::new(ProfitOracle::additive(vec![1.0, 2.0]).unwrap(), 0.0).unwrap();
        assert_eq!(f_eval(&add, &[1.0, 2.0]).unwrap().value, 0.0);
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_to_budget_simplex(&[2.0, -1.0], 1.5).unwrap().0, vec![1.5, 0.0]);
        assert_eq!(project_to_budget_simplex(&[1.0, 1.0], 1.0).unwrap().0, vec![0.5, 0.5]);
        assert_eq!(project_to_budget_simplex(&[0.25, 0.75, 0.0], 1.0).unwrap().0, vec![0.25, 0.75, 0.0]);
        assert!(project_to_budget_simplex(&[1.0], -1.0).is_err());
    }

    #[test]
    fn exact_two_player() {
        let res = ladv_exact(&empty_core()).unwrap();
        assert!((res.value - 0.125).abs() < 1e-12);
        assert!(res.x[0] >= 0.5 - 1e-9 && res.x[0] <= 1.0 + 1e-9);
    }

    #[test]
    fn sgd_two_player() {
        let g = empty_core();
        let t = 10_000;
        let cfg = SgdConfig { t, alpha: SgdConfig::theorem8_alpha(1.5, 2, t), master_seed: 7, record_trace: true };
        let a = sgd_ladv(&g, &cfg).unwrap();
        assert!(a.value >= 0.125 - 1e-12 && a.value <= 0.175, "{}", a.value);
        assert_eq!(a.trace.as_ref().unwrap().len(), t as usize + 1);
        let b = sgd_ladv(&g, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.x, b.x);
    }

    #[test]
    fn trace_csv_header() {
        let csv = trace_csv(&[TraceRow { iteration: 1, objective: 0.5, step_norm: 0.0 }]);
        assert_eq!(csv, "iteration,objective,step_norm\n1,0.5,0\n");
    }
}
