//! Core non-emptiness for truncated submodular games.
//!
//! The core is non-empty exactly when some player is a veto player or the
//! profit is additive. Both conditions need only `2n + 1` oracle queries.

use serde::Serialize;

use crate::coalition::Coalition;
use crate::error::Result;
use crate::game::{budget_tolerance, Allocation, TruncatedGame, MAX_TABLE_PLAYERS};

/// Default relative tolerance for the additivity test.
pub const ADDITIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Nonempty,
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "player")]
pub enum CoreReason {
    VetoPlayer(usize),
    Additive,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreStatus {
    pub verdict: Verdict,
    pub allocation: Option<Allocation>,
    pub reason: CoreReason,
}

/// Players `i` with `sigma(V \ {i}) < eta`.
pub fn find_veto_players(game: &TruncatedGame) -> Result<Vec<usize>> {
    let grand = game.grand();
    let mut veto = Vec::new();
    for i in 0..game.n() {
        if !game.is_successful(grand.without(i))? {
            veto.push(i);
        }
    }
    Ok(veto)
}

/// `sigma(V) == sum_i sigma({i})` up to `tol * max(1, sigma(V))`.
///
/// For submodular `sigma` this is equivalent to additivity on every coalition.
pub fn is_additive_grand(game: &TruncatedGame, tol: f64) -> Result<bool> {
    let top = game.grand_value()?;
    let mut singles = 0.0;
    for i in 0..game.n() {
        singles += game.sigma(game.singleton(i))?;
    }
    Ok((top - singles).abs() <= tol * top.abs().max(1.0))
}

pub fn core_status(game: &TruncatedGame) -> Result<CoreStatus> {
    let n = game.n();
    let top = game.grand_value()?;
    if let Some(&j) = find_veto_players(game)?.first() {
        let mut x = vec![0.0; n];
        x[j] = top;
        return Ok(CoreStatus {
            verdict: Verdict::Nonempty,
            allocation: Some(Allocation(x)),
            reason: CoreReason::VetoPlayer(j),
        });
    }
    if is_additive_grand(game, ADDITIVE_TOLERANCE)? {
        let x = (0..n).map(|i| game.sigma(game.singleton(i))).collect::<Result<Vec<_>>>()?;
        return Ok(CoreStatus { verdict: Verdict::Nonempty, allocation: Some(Allocation(x)), reason: CoreReason::Additive });
    }
    Ok(CoreStatus { verdict: Verdict::Empty, allocation: None, reason: CoreReason::Neither })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CoreCheck {
    Ok,
    Budget { total: f64, expected: f64 },
    Negative { player: usize },
    Violated { coalition: Coalition, payoff: f64, profit: f64 },
}

/// Exhaustive check of `x(V) = sigma(V)`, `x >= 0` and `x(S) >= f(S)` for all `S`.
pub fn verify_core_allocation(game: &TruncatedGame, x: &[f64]) -> Result<CoreCheck> {
    game.require_table_size("core verification", MAX_TABLE_PLAYERS)?;
    game.check_allocation_len(x)?;
    let top = game.grand_value()?;
    let tol = budget_tolerance(top);
    let total: f64 = x.iter().sum();
    if (total - top).abs() > tol {
        return Ok(CoreCheck::Budget { total, expected: top });
    }
    if let Some(player) = x.iter().position(|v| *v < 0.0) {
        return Ok(CoreCheck::Negative { player });
    }
    for s in Coalition::all(game.n()) {
        let profit = game.truncated_profit(s)?;
        let payoff = s.total(x);
        if payoff < profit - tol {
            return Ok(CoreCheck::Violated { coalition: s, payoff, profit });
        }
    }
    Ok(CoreCheck::Ok)
}
