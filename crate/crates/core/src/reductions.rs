//! Game generators from classic hardness constructions: SAT, MAX-CUT,
//! dominating set and set cover. Used as structured fixtures whose ground
//! truth can be recomputed by brute force.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Coverage, Element, ElementId, GameFile, ProfitOracle, ProfitSpec, TruncatedGame};
use crate::spread::{NodeId, SocialGraph, SpreadConfig};

/// CNF formula over variables `1..=n_vars`; literals are signed variable numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        for (j, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidParameter(format!("clause {} is empty", j + 1)));
            }
            if let Some(lit) = clause.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > n_vars) {
                return Err(Error::InvalidParameter(format!("clause {} has literal {lit} outside 1..={n_vars}", j + 1)));
            }
        }
        Ok(Self { n_vars, clauses })
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Truth value under `assignment` (bit `i` is variable `i + 1`).
    pub fn evaluate(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let value = assignment >> (lit.unsigned_abs() - 1) & 1 == 1;
                value == (lit > 0)
            })
        })
    }

    pub fn from_dimacs_str(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            if trimmed.starts_with('%') {
                break;
            }
            if trimmed.starts_with('p') {
                if header.is_some() {
                    return Err(err(line, "duplicate problem line".into()));
                }
                let parts: Vec<&str> = trimmed.split_whitespace().collect();
                if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                    return Err(err(line, format!("expected \"p cnf <vars> <clauses>\", got {trimmed:?}")));
                }
                let vars = parts[2].parse().map_err(|_| err(line, format!("bad variable count {:?}", parts[2])))?;
                let count = parts[3].parse().map_err(|_| err(line, format!("bad clause count {:?}", parts[3])))?;
                header = Some((vars, count));
                continue;
            }
            let Some((vars, _)) = header else {
                return Err(err(line, "clause before the problem line".into()));
            };
            for token in trimmed.split_whitespace() {
                let lit: i64 = token.parse().map_err(|_| err(line, format!("bad literal {token:?}")))?;
                if lit == 0 {
                    if current.is_empty() {
                        return Err(err(line, "empty clause".into()));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() as usize > vars {
                    return Err(err(line, format!("literal {lit} exceeds declared {vars} variables")));
                } else {
                    current.push(lit);
                }
            }
        }
        let Some((vars, count)) = header else {
            return Err(err(last_line, "missing \"p cnf\" problem line".into()));
        };
        if !current.is_empty() {
            return Err(err(last_line, "last clause is not terminated by 0".into()));
        }
        if clauses.len() != count {
            return Err(err(last_line, format!("header declares {count} clauses, found {}", clauses.len())));
        }
        Self::new(vars, clauses)
    }

    pub fn from_dimacs(path: &Path) -> Result<Self> {
        Self::from_dimacs_str(&read(path)?)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n_vars, self.clauses.len());
        for c in &self.clauses {
            for lit in c {
                out.push_str(&format!("{lit} "));
            }
            out.push_str("0\n");
        }
        out
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndirectedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) outside 0..{n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// Edge list text: one `u v` pair per line, `#` comments, and an optional
    /// `n N` line declaring the vertex count (otherwise `max id + 1`).
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let parts: Vec<&str> = content.split_whitespace().collect();
            let num = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| Error::Parse { line, message: format!("bad vertex id {s:?}") })
            };
            match parts.as_slice() {
                ["n", count] => declared = Some(num(count)?),
                [a, b] => {
                    let (a, b) = (num(a)?, num(b)?);
                    if a == b {
                        return Err(Error::Parse { line, message: format!("self-loop at {a}") });
                    }
                    if !seen.insert((a.min(b), a.max(b))) {
                        return Err(Error::Parse { line, message: format!("duplicate edge {a} {b}") });
                    }
                    edges.push((a, b));
                }
                _ => return Err(Error::Parse { line, message: format!("expected \"u v\" or \"n N\", got {content:?}") }),
            }
        }
        let inferred = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        let n = match declared {
            Some(d) if d < inferred => {
                return Err(Error::Parse { line: 0, message: format!("declared n = {d} but edges use vertex {}", inferred - 1) })
            }
            Some(d) => d,
            None => inferred,
        };
        Self::new(n, edges)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_edge_list(&read(path)?)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }
}

fn ic_game(graph: &SocialGraph, eta: f64) -> Result<TruncatedGame> {
    TruncatedGame::new(ProfitOracle::influence(graph, SpreadConfig::default())?, eta)
}

/// Game document for an influence game, optionally carrying `meta`.
pub fn ic_game_file(graph: &SocialGraph, eta: f64, meta: Option<serde_json::Value>) -> GameFile {
    GameFile {
        n: graph.seeds.len(),
        eta,
        profit: ProfitSpec::IcGraph { graph: graph.clone(), spread: None, tolerance: None },
        meta,
    }
}

/// Node numbering of the SAT construction.
#[derive(Debug, Clone, Copy)]
pub struct SatLayout {
    pub n: usize,
    pub m: usize,
}

impl SatLayout {
    pub fn players(&self) -> usize {
        4 * self.n + 2
    }
    pub fn s(&self, i: usize) -> NodeId {
        i as NodeId
    }
    pub fn t(&self, i: usize) -> NodeId {
        (self.n + i) as NodeId
    }
    /// `u_1..u_{n+1}` as `u(0)..u(n)`.
    pub fn u(&self, i: usize) -> NodeId {
        (2 * self.n + i) as NodeId
    }
    pub fn v(&self, i: usize) -> NodeId {
        (3 * self.n + 1 + i) as NodeId
    }
    pub fn q(&self) -> NodeId {
        (4 * self.n + 1) as NodeId
    }
    pub fn x(&self, i: usize) -> NodeId {
        (self.players() + i) as NodeId
    }
    pub fn x_bar(&self, i: usize) -> NodeId {
        (self.players() + self.n + i) as NodeId
    }
    pub fn c(&self, j: usize) -> NodeId {
        (self.players() + 2 * self.n + j) as NodeId
    }
    pub fn w(&self) -> NodeId {
        (self.players() + 2 * self.n + self.m) as NodeId
    }
}

/// `2n + m + 1/2`.
pub fn sat_eta(n: usize, m: usize) -> f64 {
    (2 * n + m) as f64 + 0.5
}

/// RLCV threshold separating satisfiable from unsatisfiable formulas:
/// `1 - (N + 7/8) / (3 (N + 1/2))` with `N = 2n + m`.
pub fn sat_threshold(n: usize, m: usize) -> f64 {
    let big_n = (2 * n + m) as f64;
    1.0 - (big_n + 0.875) / (big_n + 0.5) / 3.0
}

/// Three-layer influence game from a CNF formula with `m > 4n`.
///
/// Players are `S_i, T_i` (literal choices), dummies `u_1..u_{n+1}`,
/// `v_1..v_n`, and `Q`; targets are `x_i, x̄_i, c_j, w`.
pub fn sat_to_game(f: &CnfFormula) -> Result<(SocialGraph, TruncatedGame)> {
    let (n, m) = (f.n_vars, f.n_clauses());
    if n == 0 || m <= 4 * n {
        return Err(Error::InvalidParameter(format!("the SAT construction needs n >= 1 and m > 4n (n = {n}, m = {m})")));
    }
    let l = SatLayout { n, m };
    let seeds: Vec<NodeId> = (0..l.players() as NodeId).collect();
    let targets: Vec<NodeId> = (l.players() as NodeId..=l.w()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for src in [l.s(i), l.t(i)] {
            edges.push((src, l.x(i), 1.0));
            edges.push((src, l.x_bar(i), 1.0));
        }
        let var = (i + 1) as i64;
        for (j, clause) in f.clauses.iter().enumerate() {
            if clause.contains(&var) {
                edges.push((l.s(i), l.c(j), 1.0));
            }
            if clause.contains(&-var) {
                edges.push((l.t(i), l.c(j), 1.0));
            }
        }
        edges.push((l.u(i), l.c(i), 1.0));
    }
    for j in n..m {
        edges.push((l.u(n), l.c(j), 1.0));
    }
    let pu = 1.0 - 0.5f64.powf(1.0 / (n + 1) as f64);
    let pv = 1.0 - 0.5f64.powf(1.0 / n as f64);
    for i in 0..=n {
        edges.push((l.u(i), l.w(), pu));
    }
    for i in 0..n {
        edges.push((l.v(i), l.w(), pv));
    }
    for &target in &targets {
        edges.push((l.q(), target, if target == l.w() { 0.5 } else { 1.0 }));
    }
    let graph = SocialGraph { seeds, targets, edges };
    let game = ic_game(&graph, sat_eta(n, m))?;
    Ok((graph, game))
}

/// Two-layer construction whose ALCV (with `eta = 0`) equals the maximum cut.
///
/// Each edge gets a node in `U1`, fed by both endpoint players, and a copy in
/// `U2` fed by its `U1` node; all probabilities are 1.
pub fn maxcut_to_game(g: &UndirectedGraph) -> Result<(SocialGraph, TruncatedGame)> {
    let n = g.n;
    let e = g.edges.len();
    let seeds: Vec<NodeId> = (0..n as NodeId).collect();
    let targets: Vec<NodeId> = (n as NodeId..(n + 2 * e) as NodeId).collect();
    let mut edges = Vec::with_capacity(3 * e);
    for (k, &(a, b)) in g.edges.iter().enumerate() {
        let u1 = (n + k) as NodeId;
        let u2 = (n + e + k) as NodeId;
        edges.push((a as NodeId, u1, 1.0));
        edges.push((b as NodeId, u1, 1.0));
        edges.push((u1, u2, 1.0));
    }
    let graph = SocialGraph { seeds, targets, edges };
    let game = ic_game(&graph, 0.0)?;
    Ok((graph, game))
}

/// Candidate point `x' = 1`, `r' = 1 - (k + 1) / n` of the RLCV program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomsetCandidate {
    pub k: usize,
    pub x: Vec<f64>,
    pub r: f64,
}

/// Closed-neighbourhood bipartite graph with `eta = n`: successful
/// coalitions are exactly the dominating sets.
pub fn domset_to_game(g: &UndirectedGraph, k: usize) -> Result<(SocialGraph, TruncatedGame, DomsetCandidate)> {
    let n = g.n;
    if k < 1 || k >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= k < n (k = {k}, n = {n})")));
    }
    let seeds: Vec<NodeId> = (0..n as NodeId).collect();
    let targets: Vec<NodeId> = (n as NodeId..2 * n as NodeId).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i as NodeId, (n + i) as NodeId, 1.0));
    }
    for &(a, b) in &g.edges {
        edges.push((a as NodeId, (n + b) as NodeId, 1.0));
        edges.push((b as NodeId, (n + a) as NodeId, 1.0));
    }
    let graph = SocialGraph { seeds, targets, edges };
    let game = ic_game(&graph, n as f64)?;
    let candidate = DomsetCandidate { k, x: vec![1.0; n], r: 1.0 - (k + 1) as f64 / n as f64 };
    Ok((graph, game, candidate))
}

/// Set-cover instance document for the `gen setcover` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetCoverSpec {
    pub universe: Vec<ElementId>,
    pub sets: Vec<Vec<ElementId>>,
    #[serde(default = "one")]
    pub budget: f64,
}

fn one() -> f64 {
    1.0
}

/// Coverage game with uniform element weight `budget / |U|` and `eta = budget`,
/// so successful coalitions are exactly the set covers.
pub fn setcover_to_game(universe: &[ElementId], collection: &[Vec<ElementId>], budget: f64) -> Result<TruncatedGame> {
    TruncatedGame::new(ProfitOracle::Coverage(setcover_coverage(universe, collection, budget)?), budget)
}

pub fn setcover_coverage(universe: &[ElementId], collection: &[Vec<ElementId>], budget: f64) -> Result<Coverage> {
    if universe.is_empty() || !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter("set cover needs a nonempty universe and a positive budget".into()));
    }
    if let Some(missing) = universe.iter().find(|u| !collection.iter().any(|s| s.contains(u))) {
        return Err(Error::InvalidGame(format!("element {missing:?} is not covered by any set")));
    }
    let weight = budget / universe.len() as f64;
    let elements = universe.iter().map(|id| Element { id: id.clone(), weight }).collect();
    Coverage::new(elements, collection.to_vec())
}

impl SetCoverSpec {
    pub fn game_file(&self) -> Result<GameFile> {
        let cov = setcover_coverage(&self.universe, &self.sets, self.budget)?;
        Ok(GameFile {
            n: self.sets.len(),
            eta: self.budget,
            profit: ProfitSpec::Coverage { elements: cov.elements().to_vec(), players: self.sets.clone() },
            meta: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalition::Coalition;

    fn repeated(n_vars: usize, clause: Vec<i64>, m: usize) -> CnfFormula {
        CnfFormula::new(n_vars, vec![clause; m]).unwrap()
    }

    #[test]
    fn dimacs_parsing() {
        let f = CnfFormula::from_dimacs_str("c tiny\np cnf 1 5\n1 0\n1 0\n1 0\n1 0\n1 0\n").unwrap();
        assert_eq!((f.n_vars, f.n_clauses()), (1, 5));
        let e = CnfFormula::from_dimacs_str("p cnf 1 2\n1 0\n0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        assert!(CnfFormula::from_dimacs_str("1 0\n").is_err());
        assert!(CnfFormula::from_dimacs_str("p cnf 1 1\n2 0\n").is_err());
        assert!(CnfFormula::from_dimacs_str("p cnf 2 1\n1 -2\n").is_err());
        let g = CnfFormula::from_dimacs_str("p cnf 2 2\n1 -2\n 0 2\n0\n").unwrap();
        assert_eq!(g.clauses, vec![vec![1, -2], vec![2]]);
        assert_eq!(CnfFormula::from_dimacs_str(&g.to_dimacs()).unwrap(), g);
    }

    #[test]
    fn edge_list_parsing() {
        let g = UndirectedGraph::from_edge_list("# triangle\n0 1\n1 2\n2 0 # closing\n").unwrap();
        assert_eq!(g.n, 3);
        assert_eq!(g.edges.len(), 3);
        assert_eq!(UndirectedGraph::from_edge_list("n 4\n0 1\n").unwrap().n, 4);
        assert!(matches!(UndirectedGraph::from_edge_list("0 1\n1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(UndirectedGraph::from_edge_list("0 0\n").is_err());
        assert!(UndirectedGraph::from_edge_list("0 x\n").is_err());
    }

    #[test]
    fn sat_construction_shape() {
        let f = repeated(1, vec![1], 5);
        let (graph, game) = sat_to_game(&f).unwrap();
        assert_eq!(game.n(), 6);
        assert_eq!(game.eta(), 7.5);
        assert_eq!(graph.edges.iter().filter(|e| e.2 < 1.0).count(), 4);
        let l = SatLayout { n: 1, m: 5 };
        let q = Coalition::singleton(6, l.q() as usize);
        assert!((game.sigma(q).unwrap() - 7.5).abs() < 1e-12);
        assert!(game.is_successful(q).unwrap());
        let us = Coalition::from_players(6, [l.u(0) as usize, l.u(1) as usize]).unwrap();
        assert!((game.sigma(us).unwrap() - 5.5).abs() < 1e-12);
        assert!(!game.is_successful(us).unwrap());
        assert!(sat_to_game(&repeated(1, vec![1], 4)).is_err());
    }

    #[test]
    fn sat_threshold_values() {
        assert!((sat_threshold(1, 5) - 0.65).abs() < 1e-15);
        assert!((sat_threshold(2, 9) - (1.0 - 13.875 / 13.5 / 3.0)).abs() < 1e-15);
        assert!((sat_threshold(1, 1_000_000) - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn maxcut_profit_counts_touched_edges_twice() {
        let k3 = UndirectedGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let (_, game) = maxcut_to_game(&k3).unwrap();
        assert_eq!(game.grand_value().unwrap(), 6.0);
        assert_eq!(game.sigma(game.singleton(0)).unwrap(), 4.0);
        let (_, empty) = maxcut_to_game(&UndirectedGraph::new(3, vec![]).unwrap()).unwrap();
        assert_eq!(empty.grand_value().unwrap(), 0.0);
    }

    #[test]
    fn domset_candidate() {
        let path = UndirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let (_, game, cand) = domset_to_game(&path, 1).unwrap();
        assert_eq!(cand.x, vec![1.0, 1.0, 1.0]);
        assert!((cand.r - 1.0 / 3.0).abs() < 1e-15);
        assert!(game.is_successful(game.singleton(1)).unwrap());
        assert!(!game.is_successful(game.singleton(0)).unwrap());
        assert!(domset_to_game(&path, 3).is_err());
    }

    #[test]
    fn setcover_game() {
        let id = ElementId::Num;
        let g = setcover_to_game(&[id(1), id(2)], &[vec![id(1), id(2)], vec![id(1)]], 2.0).unwrap();
        assert_eq!(g.grand_value().unwrap(), 2.0);
        assert_eq!(g.sigma(g.singleton(1)).unwrap(), 1.0);
        assert!(setcover_to_game(&[id(1), id(3)], &[vec![id(1)]], 1.0).is_err());
    }
}
