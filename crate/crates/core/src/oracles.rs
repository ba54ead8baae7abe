//! Brute-force reference values.
//!
//! Everything here enumerates all `2^n` coalitions and writes out the full
//! linear program, using nothing from the solver modules except the LP
//! engine itself. Intended for `n <= 12` (and `n <= 20` for the purely
//! combinatorial searches).

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::TruncatedGame;
use crate::linopt::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::reductions::{CnfFormula, UndirectedGraph};

pub const MAX_LP_PLAYERS: usize = 12;
pub const MAX_SEARCH_BITS: usize = 20;

struct Profits {
    n: usize,
    sigma: Vec<f64>,
    success: Vec<bool>,
}

impl Profits {
    fn of(game: &TruncatedGame) -> Result<Self> {
        let n = game.n();
        if n > MAX_LP_PLAYERS {
            return Err(Error::TooManyPlayers { what: "reference oracle", max: MAX_LP_PLAYERS, n });
        }
        let mut sigma = Vec::with_capacity(1 << n);
        let mut success = Vec::with_capacity(1 << n);
        for s in Coalition::all(n) {
            let v = game.sigma(s)?;
            sigma.push(v);
            success.push(game.reaches_eta(v));
        }
        Ok(Self { n, sigma, success })
    }

    fn truncated(&self, s: Coalition) -> f64 {
        if self.success[s.index()] {
            self.sigma[s.index()]
        } else {
            0.0
        }
    }

    fn top(&self) -> f64 {
        self.sigma[self.sigma.len() - 1]
    }

    /// LP over `(x, z)` with `x >= 0`, free `z`, `x(V) = sigma(V)`, minimizing `z`.
    fn base(&self) -> LinearProgram {
        let n = self.n;
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let mut lp = LinearProgram::minimize(c);
        lp.set_bounds(n, f64::NEG_INFINITY, f64::INFINITY);
        let mut row = vec![1.0; n];
        row.push(0.0);
        lp.add(row, Relation::Eq, self.top());
        lp
    }

    fn row(&self, s: Coalition, z_coeff: f64) -> Vec<f64> {
        let mut row: Vec<f64> = (0..self.n).map(|i| if s.contains(i) { 1.0 } else { 0.0 }).collect();
        row.push(z_coeff);
        row
    }
}

fn optimum(lp: &LinearProgram) -> Result<f64> {
    match solve_lp(lp)? {
        LpOutcome::Optimal(sol) => Ok(sol.value),
        LpOutcome::Infeasible => Err(Error::LpStatus("reference LP infeasible")),
        LpOutcome::Unbounded => Err(Error::LpStatus("reference LP unbounded")),
    }
}

/// Does some `x >= 0` with `x(V) = f(V)` satisfy `x(S) >= f(S)` for all `S`?
pub fn brute_core_feasible(game: &TruncatedGame) -> Result<bool> {
    let p = Profits::of(game)?;
    let mut lp = LinearProgram::minimize(vec![0.0; p.n]);
    lp.add(vec![1.0; p.n], Relation::Eq, p.top());
    for s in Coalition::all(p.n) {
        let row = (0..p.n).map(|i| if s.contains(i) { 1.0 } else { 0.0 }).collect();
        lp.add(row, Relation::Ge, p.truncated(s));
    }
    Ok(matches!(solve_lp(&lp)?, LpOutcome::Optimal(_)))
}

/// `min r` s.t. `x(S) >= (1 - r) sigma(S)` for successful `S`.
pub fn brute_rlcv(game: &TruncatedGame) -> Result<f64> {
    let p = Profits::of(game)?;
    if p.top() <= 0.0 {
        return Ok(0.0);
    }
    let mut lp = p.base();
    for s in Coalition::all(p.n) {
        if p.success[s.index()] && !s.is_empty() {
            let v = p.sigma[s.index()];
            lp.add(p.row(s, v), Relation::Ge, v);
        }
    }
    optimum(&lp)
}

/// `min eps` s.t. `x(S) >= f(S) - eps` for every `S`.
pub fn brute_alcv(game: &TruncatedGame) -> Result<f64> {
    let p = Profits::of(game)?;
    let mut lp = p.base();
    for s in Coalition::all(p.n) {
        if !s.is_empty() {
            lp.add(p.row(s, 1.0), Relation::Ge, p.truncated(s));
        }
    }
    optimum(&lp)
}

/// Relaxed variant: `x(S) >= eta - eps` for successful `S`, clamped at 0.
pub fn brute_alcv_re(game: &TruncatedGame) -> Result<f64> {
    let p = Profits::of(game)?;
    let mut lp = p.base();
    for s in Coalition::all(p.n) {
        if p.success[s.index()] && !s.is_empty() {
            lp.add(p.row(s, 1.0), Relation::Ge, game.eta());
        }
    }
    Ok(optimum(&lp)?.max(0.0))
}

/// Strengthened variant: `x(S) >= sigma(S) - eps` for every `S`.
pub fn brute_alcv_str(game: &TruncatedGame) -> Result<f64> {
    let p = Profits::of(game)?;
    let mut lp = p.base();
    for s in Coalition::all(p.n) {
        if !s.is_empty() {
            lp.add(p.row(s, 1.0), Relation::Ge, p.sigma[s.index()]);
        }
    }
    optimum(&lp)
}

/// `min 2^-n sum_S s_S` with `s_S >= f(S) - x(S)`, `s_S >= 0`.
pub fn brute_ladv(game: &TruncatedGame) -> Result<f64> {
    let p = Profits::of(game)?;
    let n = p.n;
    let size = 1usize << n;
    let mut c = vec![0.0; n + size];
    for v in &mut c[n..] {
        *v = 1.0 / size as f64;
    }
    let mut lp = LinearProgram::minimize(c);
    let mut row = vec![0.0; n + size];
    row[..n].fill(1.0);
    lp.add(row, Relation::Eq, p.top());
    for s in Coalition::all(n) {
        let f = p.truncated(s);
        if f > 0.0 {
            let mut row = vec![0.0; n + size];
            for i in s.members() {
                row[i] = 1.0;
            }
            row[n + s.index()] = 1.0;
            lp.add(row, Relation::Ge, f);
        }
    }
    optimum(&lp)
}

/// Does `(x, r)` satisfy `x(S) >= (1 - r) sigma(S)` for every successful `S`?
pub fn brute_rlcv_point_feasible(game: &TruncatedGame, x: &[f64], r: f64, tol: f64) -> Result<bool> {
    let p = Profits::of(game)?;
    Ok(Coalition::all(p.n).all(|s| {
        !p.success[s.index()] || s.members().map(|i| x[i]).sum::<f64>() >= (1.0 - r) * p.sigma[s.index()] - tol
    }))
}

fn check_bits(what: &'static str, n: usize) -> Result<()> {
    if n > MAX_SEARCH_BITS {
        return Err(Error::TooManyPlayers { what, max: MAX_SEARCH_BITS, n });
    }
    Ok(())
}

pub fn brute_max_cut(g: &UndirectedGraph) -> Result<usize> {
    check_bits("max cut search", g.n)?;
    Ok((0u64..1 << g.n)
        .map(|side| g.edges.iter().filter(|&&(a, b)| (side >> a & 1) != (side >> b & 1)).count())
        .max()
        .unwrap_or(0))
}

pub fn brute_min_dominating_set(g: &UndirectedGraph) -> Result<usize> {
    check_bits("dominating set search", g.n)?;
    let mut closed = vec![0u64; g.n];
    for (i, m) in closed.iter_mut().enumerate() {
        *m = 1 << i;
    }
    for &(a, b) in &g.edges {
        closed[a] |= 1 << b;
        closed[b] |= 1 << a;
    }
    let full = if g.n == 0 { 0 } else { (1u64 << g.n) - 1 };
    Ok((0u64..1 << g.n)
        .filter(|s| (0..g.n).filter(|i| s >> i & 1 == 1).fold(0, |acc, i| acc | closed[i]) == full)
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0))
}

pub fn brute_sat(f: &CnfFormula) -> Result<bool> {
    check_bits("satisfiability search", f.n_vars)?;
    Ok((0u64..1 << f.n_vars).any(|a| f.evaluate(a)))
}

/// `max_S g(S)` by enumeration, with the first maximizer in canonical order.
pub fn brute_submodular_max<F>(n: usize, mut g: F) -> Result<(f64, Coalition)>
where
    F: FnMut(Coalition) -> Result<f64>,
{
    check_bits("set function maximization", n)?;
    let mut best = (f64::NEG_INFINITY, Coalition::empty(n));
    for s in Coalition::all(n) {
        let v = g(s)?;
        if v > best.0 {
            best = (v, s);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ProfitOracle;

    fn table(values: &[f64], eta: f64) -> TruncatedGame {
        TruncatedGame::new(ProfitOracle::table(values.to_vec()).unwrap(), eta).unwrap()
    }

    #[test]
    fn two_player_fixture() {
        let g = table(&[0.0, 1.0, 1.0, 1.5], 0.0);
        assert!(!brute_core_feasible(&g).unwrap());
        assert!((brute_rlcv(&g).unwrap() - 0.25).abs() < 1e-9);
        assert!((brute_alcv(&g).unwrap() - 0.25).abs() < 1e-9);
        assert!((brute_ladv(&g).unwrap() - 0.125).abs() < 1e-9);
    }

    #[test]
    fn core_nonempty_gives_zero() {
        let g = TruncatedGame::new(ProfitOracle::additive(vec![1.0, 2.0, 0.5]).unwrap(), 1.0).unwrap();
        assert!(brute_core_feasible(&g).unwrap());
        assert!(brute_rlcv(&g).unwrap().abs() < 1e-9);
        assert!(brute_alcv(&g).unwrap().abs() < 1e-9);
        assert!(brute_ladv(&g).unwrap().abs() < 1e-9);
    }

    #[test]
    fn combinatorial_searches() {
        let k3 = UndirectedGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(brute_max_cut(&k3).unwrap(), 2);
        let path = UndirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(brute_min_dominating_set(&path).unwrap(), 1);
        assert!(!brute_sat(&CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap()).unwrap());
        assert!(brute_sat(&CnfFormula::new(2, vec![vec![1, 2], vec![-1]]).unwrap()).unwrap());
        let (v, s) = brute_submodular_max(2, |s| Ok([0.0, 0.25, 0.5, 0.0][s.index()])).unwrap();
        assert_eq!((v, s.bits()), (0.5, 0b10));
    }
}
