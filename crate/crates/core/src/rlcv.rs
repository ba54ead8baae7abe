//! Relative least-core value: the smallest `r` such that some budget-balanced
//! allocation gives every successful coalition at least `(1 - r) sigma(S)`.
//!
//! Three routes: singleton constraints when `eta = 0` (the proportional
//! shortfall of any coalition is dominated by its worst member), full
//! enumeration of successful coalitions, and cut generation with an
//! enumerating separation oracle.

use serde::Serialize;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{Allocation, TruncatedGame, MAX_TABLE_PLAYERS};
use crate::linopt::{self, Constraint, Cut, CutOutcome, LinearProgram, Relation, Separation};

pub const MAX_CUTGEN_PLAYERS: usize = 24;
pub const DEFAULT_MAX_ROUNDS: usize = 10_000;
const SEP_TOL: f64 = 1e-8;
const TIGHT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RlcvMethod {
    EtaZero,
    ExactEnum,
    CutGen,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RlcvResult {
    pub r: f64,
    pub x: Allocation,
    pub method: RlcvMethod,
    pub tight_coalitions: Vec<Coalition>,
    /// LP solves performed (1 unless cut generation).
    pub rounds: usize,
    /// Coalition rows in the final LP.
    pub rows: usize,
}

/// `x(S) + sigma(S) r >= sigma(S)` over variables `(x_0..x_{n-1}, r)`.
fn coalition_row(n: usize, s: Coalition, sigma_s: f64) -> Constraint {
    let mut coeffs = s.indicator();
    coeffs.push(sigma_s);
    debug_assert_eq!(coeffs.len(), n + 1);
    Constraint::new(coeffs, Relation::Ge, sigma_s)
}

fn base_lp(n: usize, top: f64) -> LinearProgram {
    let mut objective = vec![0.0; n];
    objective.push(1.0);
    let mut lp = LinearProgram::minimize(objective);
    lp.set_bounds(n, 0.0, 1.0);
    let mut budget = vec![1.0; n];
    budget.push(0.0);
    lp.add(budget, Relation::Eq, top);
    lp
}

fn finish(
    game: &TruncatedGame,
    sol: &linopt::LpSolution,
    rows: &[(Coalition, f64)],
    method: RlcvMethod,
    rounds: usize,
) -> RlcvResult {
    let n = game.n();
    let r = sol.x[n].clamp(0.0, 1.0);
    let x = Allocation::from_solver(sol.x[..n].to_vec());
    let tight_coalitions = rows
        .iter()
        .filter(|(s, v)| (s.total(&x) - (1.0 - r) * v).abs() <= TIGHT_TOL * v.max(1.0))
        .map(|(s, _)| *s)
        .collect();
    RlcvResult { r, x, method, tight_coalitions, rounds, rows: rows.len() }
}

/// Exact RLCV for `eta = 0` from the `n` singleton constraints.
pub fn rlcv_eta_zero(game: &TruncatedGame) -> Result<RlcvResult> {
    if game.eta() != 0.0 {
        return Err(Error::WrongMethod { method: "eta-zero", requirement: format!("eta = 0 (got {})", game.eta()) });
    }
    let n = game.n();
    let mut lp = base_lp(n, game.grand_value()?);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let s = game.singleton(i);
        let v = game.sigma(s)?;
        if v > 0.0 {
            lp.push(coalition_row(n, s, v));
            rows.push((s, v));
        }
    }
    let sol = linopt::solve_lp(&lp)?.optimal()?;
    Ok(finish(game, &sol, &rows, RlcvMethod::EtaZero, 1))
}

/// Exact RLCV from every successful coalition (`n <= 20`).
pub fn rlcv_exact(game: &TruncatedGame) -> Result<RlcvResult> {
    game.require_table_size("rlcv exact", MAX_TABLE_PLAYERS)?;
    let n = game.n();
    let table = game.tabulate()?;
    let mut lp = base_lp(n, table[table.len() - 1]);
    let mut rows = Vec::new();
    for s in Coalition::all(n) {
        let v = table[s.index()];
        if v > 0.0 && game.reaches_eta(v) {
            lp.push(coalition_row(n, s, v));
            rows.push((s, v));
        }
    }
    let sol = linopt::solve_lp(&lp)?.optimal()?;
    Ok(finish(game, &sol, &rows, RlcvMethod::ExactEnum, 1))
}

/// First successful coalition (canonical order) with `x(S) < (1 - r) sigma(S)`.
///
/// Exhaustive; also decides feasibility of an arbitrary candidate `(x, r)`.
pub fn separate_rlcv(game: &TruncatedGame, x: &[f64], r: f64) -> Result<Option<Coalition>> {
    game.require_table_size("rlcv separation", MAX_CUTGEN_PLAYERS)?;
    game.check_allocation_len(x)?;
    let n = game.n();
    for s in Coalition::all(n) {
        let v = game.sigma(s)?;
        if v > 0.0 && game.reaches_eta(v) {
            let mut point = x.to_vec();
            point.push(r);
            if coalition_row(n, s, v).violation(&point) > SEP_TOL {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// RLCV by cut generation, starting from the grand-coalition row.
pub fn rlcv_cut_generation(game: &TruncatedGame, max_rounds: usize) -> Result<RlcvResult> {
    game.require_table_size("rlcv cut generation", MAX_CUTGEN_PLAYERS)?;
    let owned;
    let game = if game.n() <= MAX_TABLE_PLAYERS {
        owned = game.tabulated()?;
        &owned
    } else {
        game
    };
    let n = game.n();
    let top = game.grand_value()?;
    let mut lp = base_lp(n, top);
    let mut rows = Vec::new();
    if top > 0.0 {
        lp.push(coalition_row(n, game.grand(), top));
        rows.push((game.grand(), top));
    }
    let outcome = linopt::solve_with_cuts(
        &lp,
        |sol| {
            Ok(match separate_rlcv(game, &sol.x[..n], sol.x[n])? {
                None => Separation::Feasible,
                Some(s) => {
                    let v = game.sigma(s)?;
                    Separation::Violated(Cut { constraint: coalition_row(n, s, v), witness: Some(s) })
                }
            })
        },
        max_rounds,
    )?;
    match outcome {
        CutOutcome::Optimal { solution, rounds, cuts } => {
            for cut in &cuts {
                let s = cut.witness.expect("rlcv cuts carry coalitions");
                rows.push((s, cut.constraint.rhs));
            }
            Ok(finish(game, &solution, &rows, RlcvMethod::CutGen, rounds))
        }
        CutOutcome::Infeasible { .. } => Err(Error::LpStatus("infeasible")),
        CutOutcome::Unbounded { .. } => Err(Error::LpStatus("unbounded")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarialCover {
    /// `max_x min_{S successful} x(S)` with `x >= 0`, `x(V) = M`.
    pub value: f64,
    pub x: Allocation,
    pub budget: f64,
    /// `1 - value / M`, the RLCV of the same game.
    pub implied_rlcv: f64,
}

/// Adversarial covering value of a game with `eta = sigma(V) = M`.
pub fn adversarial_cover_value(game: &TruncatedGame) -> Result<AdversarialCover> {
    game.require_table_size("adversarial cover", MAX_TABLE_PLAYERS)?;
    let n = game.n();
    let table = game.tabulate()?;
    let budget = table[table.len() - 1];
    if (game.eta() - budget).abs() > game.eta_tolerance() {
        return Err(Error::WrongMethod {
            method: "adversarial",
            requirement: format!("eta = sigma(V) (eta = {}, sigma(V) = {budget})", game.eta()),
        });
    }
    let mut objective = vec![0.0; n];
    objective.push(1.0);
    let mut lp = LinearProgram::maximize(objective);
    let mut sum = vec![1.0; n];
    sum.push(0.0);
    lp.add(sum, Relation::Eq, budget);
    for s in Coalition::all(n) {
        if !s.is_empty() && game.reaches_eta(table[s.index()]) {
            let mut row = s.indicator();
            row.push(-1.0);
            lp.add(row, Relation::Ge, 0.0);
        }
    }
    let sol = linopt::solve_lp(&lp)?.optimal()?;
    let value = sol.x[n];
    let implied_rlcv = if budget > 0.0 { 1.0 - value / budget } else { 0.0 };
    Ok(AdversarialCover { value, x: Allocation::from_solver(sol.x[..n].to_vec()), budget, implied_rlcv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ProfitOracle;

    fn table(values: &[f64], eta: f64) -> TruncatedGame {
        TruncatedGame::new(ProfitOracle::table(values.to_vec()).unwrap(), eta).unwrap()
    }

    #[test]
    fn two_player_empty_core() {
        let g = table(&[0.0, 1.0, 1.0, 1.5], 0.0);
        for res in [rlcv_eta_zero(&g).unwrap(), rlcv_exact(&g).unwrap(), rlcv_cut_generation(&g, 50).unwrap()] {
            assert!((res.r - 0.25).abs() < 1e-9, "{res:?}");
            assert!((res.x[0] - 0.75).abs() < 1e-9 && (res.x[1] - 0.75).abs() < 1e-9);
        }
    }

    #[test]
    fn additive_game_has_zero_rlcv() {
        let g = TruncatedGame::new(ProfitOracle::additive(vec![1.0, 2.0, 3.0]).unwrap(), 0.0).unwrap();
        let res = rlcv_eta_zero(&g).unwrap();
        assert!(res.r.abs() < 1e-12);
        assert_eq!(res.x.0, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eta_zero_rejects_positive_eta() {
        let g = table(&[0.0, 1.0, 1.0, 1.5], 1.0);
        assert!(matches!(rlcv_eta_zero(&g), Err(Error::WrongMethod { .. })));
    }

    #[test]
    fn only_grand_coalition_successful() {
        let g = table(&[0.0, 1.0, 1.0, 1.5], 1.5);
        let res = rlcv_cut_generation(&g, 10).unwrap();
        assert_eq!(res.r, 0.0);
        assert_eq!(res.rounds, 1);
    }

    #[test]
    fn separation_finds_first_violated() {
        let g = table(&[0.0, 1.0, 1.0, 1.5], 0.0);
        assert_eq!(separate_rlcv(&g, &[1.5, 0.0], 0.0).unwrap(), Some(g.singleton(1)));
        assert_eq!(separate_rlcv(&g, &[0.75, 0.75], 0.25).unwrap(), None);
    }

    #[test]
    fn adversarial_two_identical_sets() {
        // two players each covering the single element, M = 1
        let g = table(&[0.0, 1.0, 1.0, 1.0], 1.0);
        let adv = adversarial_cover_value(&g).unwrap();
        assert!((adv.value - 0.5).abs() < 1e-9);
        let r = rlcv_exact(&g).unwrap().r;
        assert!((adv.implied_rlcv - r).abs() < 1e-9);
        assert!(adversarial_cover_value(&table(&[0.0, 1.0, 1.0, 1.0], 0.5)).is_err());
    }
}
