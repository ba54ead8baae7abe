//! Truncated submodular profit games `(V, sigma, eta)` and their value oracles.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::spread::{InfluenceGraph, SocialGraph, SpreadConfig};

/// Largest player count for which a full `2^n` table is stored or enumerated.
pub const MAX_TABLE_PLAYERS: usize = 20;

/// Comparison slack against `eta` for inexact (influence) oracles.
pub const DEFAULT_ETA_TOLERANCE: f64 = 1e-9;

/// Tolerance for allocation budgets: `1e-9 * max(1, total)`.
pub fn budget_tolerance(total: f64) -> f64 {
    1e-9 * total.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementId {
    Num(i64),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: ElementId,
    pub weight: f64,
}

/// Weighted coverage: `sigma(S)` is the total weight of elements covered by `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    elements: Vec<Element>,
    covers: Vec<Vec<usize>>,
}

impl Coverage {
    pub fn new(elements: Vec<Element>, players: Vec<Vec<ElementId>>) -> Result<Self> {
        let mut index = HashMap::new();
        for (k, e) in elements.iter().enumerate() {
            if !(e.weight >= 0.0 && e.weight.is_finite()) {
                return Err(Error::InvalidGame(format!("element {:?} has weight {}", e.id, e.weight)));
            }
            if index.insert(e.id.clone(), k).is_some() {
                return Err(Error::InvalidGame(format!("duplicate element id {:?}", e.id)));
            }
        }
        let covers = players
            .iter()
            .map(|ids| {
                let mut v = ids
                    .iter()
                    .map(|id| {
                        index
                            .get(id)
                            .copied()
                            .ok_or_else(|| Error::InvalidGame(format!("unknown element id {id:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                v.sort_unstable();
                v.dedup();
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { elements, covers })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn covered_by(&self, player: usize) -> &[usize] {
        &self.covers[player]
    }

    fn value(&self, s: Coalition) -> f64 {
        let mut hit = vec![false; self.elements.len()];
        for p in s.members() {
            for &e in &self.covers[p] {
                hit[e] = true;
            }
        }
        // Sum in element order so equal covers give bit-identical values.
        hit.iter().zip(&self.elements).filter(|(h, _)| **h).map(|(_, e)| e.weight).sum()
    }
}

/// Influence-spread oracle over a social graph.
#[derive(Debug, Clone)]
pub struct InfluenceOracle {
    pub graph: InfluenceGraph,
    pub config: SpreadConfig,
}

/// Value oracle for the untruncated profit `sigma`.
#[derive(Debug, Clone)]
pub enum ProfitOracle {
    /// `2^n` values indexed by coalition encoding.
    Table(Vec<f64>),
    Additive(Vec<f64>),
    Coverage(Coverage),
    Influence(Box<InfluenceOracle>),
}

impl ProfitOracle {
    /// Table oracle, checked exhaustively for normalization, monotonicity and submodularity.
    pub fn table(values: Vec<f64>) -> Result<Self> {
        match validate_oracle(&values) {
            OracleCheck::Ok => Ok(Self::Table(values)),
            bad => Err(Error::InvalidGame(bad.to_string())),
        }
    }

    pub fn additive(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidGame(format!("additive weight {w} is not a finite non-negative number")));
        }
        Ok(Self::Additive(weights))
    }

    pub fn influence(graph: &SocialGraph, config: SpreadConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self::Influence(Box::new(InfluenceOracle { graph: graph.compile()?, config })))
    }

    pub fn n_players(&self) -> usize {
        match self {
            Self::Table(v) => v.len().trailing_zeros() as usize,
            Self::Additive(w) => w.len(),
            Self::Coverage(c) => c.covers.len(),
            Self::Influence(o) => o.graph.n_players(),
        }
    }

    fn value(&self, s: Coalition) -> Result<f64> {
        Ok(match self {
            Self::Table(v) => v[s.index()],
            Self::Additive(w) => s.members().map(|i| w[i]).sum(),
            Self::Coverage(c) => c.value(s),
            Self::Influence(o) => o.graph.spread(s, &o.config)?,
        })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Self::Influence(_))
    }
}

/// Result of an exhaustive table check.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleCheck {
    Ok,
    BadLength { len: usize },
    InvalidValue { s: Coalition, value: f64 },
    Normalization { value: f64 },
    /// `sigma(s) > sigma(t)` with `s` a subset of `t`.
    Monotonicity { s: Coalition, t: Coalition },
    /// Marginal of `u` given `s` is smaller than given its superset `t`.
    Submodularity { s: Coalition, t: Coalition, u: usize },
}

impl std::fmt::Display for OracleCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Ok => write!(f, "ok"),
            Self::BadLength { len } => write!(f, "table length {len} is not 2^n for n <= {MAX_TABLE_PLAYERS}"),
            Self::InvalidValue { s, value } => write!(f, "sigma({s}) = {value} is not a finite non-negative number"),
            Self::Normalization { value } => write!(f, "sigma(empty) = {value}, expected 0"),
            Self::Monotonicity { s, t } => write!(f, "not monotone: sigma({s}) > sigma({t})"),
            Self::Submodularity { s, t, u } => {
                write!(f, "not submodular: marginal of {u} given {s} is below its marginal given {t}")
            }
        }
    }
}

/// Exhaustive check of `sigma(empty) = 0`, monotonicity and submodularity.
///
/// Uses the local forms (single-element steps, pairwise diminishing returns),
/// which are equivalent to the global definitions. Violations smaller than
/// `1e-9` relative to the largest value are ignored.
pub fn validate_oracle(table: &[f64]) -> OracleCheck {
    let len = table.len();
    if !len.is_power_of_two() || len.trailing_zeros() as usize > MAX_TABLE_PLAYERS {
        return OracleCheck::BadLength { len };
    }
    let n = len.trailing_zeros() as usize;
    for (bits, &value) in table.iter().enumerate() {
        if !(value >= 0.0 && value.is_finite()) {
            let s = Coalition::from_bits(n, bits as u64).expect("in range");
            return OracleCheck::InvalidValue { s, value };
        }
    }
    if table[0] != 0.0 {
        return OracleCheck::Normalization { value: table[0] };
    }
    let scale = table.iter().cloned().fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    for s in Coalition::all(n) {
        for u in (0..n).filter(|&u| !s.contains(u)) {
            let su = s.with(u);
            if table[s.index()] > table[su.index()] + tol {
                return OracleCheck::Monotonicity { s, t: su };
            }
        }
    }
    for s in Coalition::all(n) {
        for u in (0..n).filter(|&u| !s.contains(u)) {
            let gain = table[s.with(u).index()] - table[s.index()];
            for v in (0..n).filter(|&v| v != u && !s.contains(v)) {
                let t = s.with(v);
                let later = table[t.with(u).index()] - table[t.index()];
                if later > gain + tol {
                    return OracleCheck::Submodularity { s, t, u };
                }
            }
        }
    }
    OracleCheck::Ok
}

/// A truncated submodular profit game `(V, sigma, eta)`.
///
/// The truncated profit is `f(S) = sigma(S)` when `sigma(S) >= eta` and `0`
/// otherwise. Exact oracles compare against `eta` with no slack; influence
/// oracles allow `eta_tolerance`.
#[derive(Debug, Clone)]
pub struct TruncatedGame {
    n: usize,
    sigma: ProfitOracle,
    eta: f64,
    eta_tolerance: f64,
}

impl TruncatedGame {
    pub fn new(sigma: ProfitOracle, eta: f64) -> Result<Self> {
        let tol = if sigma.is_exact() { 0.0 } else { DEFAULT_ETA_TOLERANCE };
        Self::with_tolerance(sigma, eta, tol)
    }

    pub fn with_tolerance(sigma: ProfitOracle, eta: f64, eta_tolerance: f64) -> Result<Self> {
        let n = sigma.n_players();
        if n > MAX_PLAYERS {
            return Err(Error::TooManyPlayers { what: "game", max: MAX_PLAYERS, n });
        }
        if n == 0 {
            return Err(Error::InvalidGame("game needs at least one player".into()));
        }
        if let ProfitOracle::Table(v) = &sigma {
            if v.len() != 1 << n {
                return Err(Error::InvalidGame(format!("table has {} entries, expected 2^{n}", v.len())));
            }
        }
        if !(eta_tolerance >= 0.0) {
            return Err(Error::InvalidParameter(format!("eta tolerance {eta_tolerance}")));
        }
        let game = Self { n, sigma, eta, eta_tolerance };
        let top = game.grand_value()?;
        if !(eta >= 0.0 && eta <= top + eta_tolerance) {
            return Err(Error::InvalidGame(format!("eta = {eta} must lie in [0, sigma(V) = {top}]")));
        }
        Ok(game)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eta_tolerance(&self) -> f64 {
        self.eta_tolerance
    }

    pub fn oracle(&self) -> &ProfitOracle {
        &self.sigma
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.n)
    }

    pub fn empty(&self) -> Coalition {
        Coalition::empty(self.n)
    }

    pub fn singleton(&self, i: usize) -> Coalition {
        Coalition::singleton(self.n, i)
    }

    fn check(&self, s: Coalition) -> Result<()> {
        if s.width() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, found: s.width() });
        }
        Ok(())
    }

    pub fn sigma(&self, s: Coalition) -> Result<f64> {
        self.check(s)?;
        if s.is_empty() {
            return Ok(0.0);
        }
        self.sigma.value(s)
    }

    pub fn grand_value(&self) -> Result<f64> {
        self.sigma(self.grand())
    }

    /// Whether a profit value reaches the threshold (inclusive).
    pub fn reaches_eta(&self, value: f64) -> bool {
        value >= self.eta - self.eta_tolerance
    }

    pub fn is_successful(&self, s: Coalition) -> Result<bool> {
        Ok(self.reaches_eta(self.sigma(s)?))
    }

    pub fn truncated_profit(&self, s: Coalition) -> Result<f64> {
        let v = self.sigma(s)?;
        Ok(if self.reaches_eta(v) { v } else { 0.0 })
    }

    /// `max{f(S) - x(S), 0}`.
    pub fn dissatisfaction(&self, s: Coalition, x: &[f64]) -> Result<f64> {
        self.check_allocation_len(x)?;
        Ok((self.truncated_profit(s)? - s.total(x)).max(0.0))
    }

    pub(crate) fn check_allocation_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "allocation has length {}, game has {} players",
                x.len(),
                self.n
            )));
        }
        Ok(())
    }

    pub(crate) fn require_table_size(&self, what: &'static str, max: usize) -> Result<()> {
        if self.n > max {
            return Err(Error::TooManyPlayers { what, max, n: self.n });
        }
        Ok(())
    }

    /// `sigma` on all `2^n` coalitions, in encoding order.
    pub fn tabulate(&self) -> Result<Vec<f64>> {
        self.require_table_size("tabulation", MAX_TABLE_PLAYERS)?;
        if let ProfitOracle::Table(v) = &self.sigma {
            return Ok(v.clone());
        }
        let n = self.n;
        (0..1u64 << n)
            .into_par_iter()
            .map(|bits| self.sigma(Coalition::from_bits(n, bits).expect("in range")))
            .collect()
    }

    /// Same game backed by a precomputed table; keeps `eta` and its tolerance.
    pub fn tabulated(&self) -> Result<Self> {
        let values = self.tabulate()?;
        Ok(Self { sigma: ProfitOracle::Table(values), ..self.clone() })
    }
}

/// Non-negative allocation vector with a fixed total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(pub Vec<f64>);

impl Allocation {
    pub fn new(x: Vec<f64>, total: f64) -> Result<Self> {
        let a = Self(x);
        a.check(total)?;
        Ok(a)
    }

    /// Takes a solver vertex, flushing round-off negatives to zero.
    pub fn from_solver(mut x: Vec<f64>) -> Self {
        for v in &mut x {
            if *v < 0.0 && *v > -1e-9 {
                *v = 0.0;
            }
        }
        Self(x)
    }

    pub fn check(&self, total: f64) -> Result<()> {
        if let Some(v) = self.0.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("allocation entry {v} is negative")));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - total).abs() > budget_tolerance(total) {
            return Err(Error::InvalidParameter(format!("allocation sums to {sum}, expected {total}")));
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn uniform(n: usize, total: f64) -> Self {
        Self(vec![total / n as f64; n])
    }
}

impl std::ops::Deref for Allocation {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

// ---------------------------------------------------------------------------
// JSON instance documents

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfitSpec {
    Table {
        values: Vec<f64>,
    },
    Additive {
        weights: Vec<f64>,
    },
    Coverage {
        elements: Vec<Element>,
        players: Vec<Vec<ElementId>>,
    },
    IcGraph {
        graph: SocialGraph,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spread: Option<SpreadConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

/// On-disk game instance: `{"n", "eta", "profit": {"type", ...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameFile {
    pub n: usize,
    pub eta: f64,
    pub profit: ProfitSpec,
    /// Free-form provenance (e.g. reduction candidates); ignored when loading.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl GameFile {
    pub fn to_game(&self) -> Result<TruncatedGame> {
        let (oracle, tol) = match &self.profit {
            ProfitSpec::Table { values } => (ProfitOracle::table(values.clone())?, None),
            ProfitSpec::Additive { weights } => (ProfitOracle::additive(weights.clone())?, None),
            ProfitSpec::Coverage { elements, players } => {
                (ProfitOracle::Coverage(Coverage::new(elements.clone(), players.clone())?), None)
            }
            ProfitSpec::IcGraph { graph, spread, tolerance } => {
                (ProfitOracle::influence(graph, spread.unwrap_or_default())?, *tolerance)
            }
        };
        if oracle.n_players() != self.n {
            return Err(Error::InvalidGame(format!(
                "\"n\" is {} but the profit describes {} players",
                self.n,
                oracle.n_players()
            )));
        }
        match tol {
            Some(t) => TruncatedGame::with_tolerance(oracle, self.eta, t),
            None => TruncatedGame::new(oracle, self.eta),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game files serialize")
    }
}
