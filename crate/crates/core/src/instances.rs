//! Seeded random instances for tests and benchmarks.
//!
//! Profit values are multiples of 1/4 so sums and comparisons against `eta`
//! are exact in floating point.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coalition::Coalition;
use crate::error::Result;
use crate::game::{ProfitOracle, TruncatedGame};
use crate::reductions::{CnfFormula, UndirectedGraph};

fn quarter(rng: &mut impl Rng, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 4.0
}

fn table_of(n: usize, f: impl Fn(Coalition) -> f64) -> Vec<f64> {
    Coalition::all(n).map(f).collect()
}

/// Weighted coverage: each player covers a random subset of `n + 2` elements.
pub fn random_coverage_table(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let elements = n + 2;
    let weights: Vec<f64> = (0..elements).map(|_| quarter(rng, 1, 8)).collect();
    let density = rng.gen_range(0.15..0.6);
    let covers: Vec<u64> =
        (0..n).map(|_| (0..elements).filter(|_| rng.gen_bool(density)).fold(0u64, |m, e| m | 1 << e)).collect();
    table_of(n, |s| {
        let covered = s.members().fold(0u64, |m, i| m | covers[i]);
        (0..elements).filter(|e| covered >> e & 1 == 1).map(|e| weights[e]).sum()
    })
}

/// `min(sum_{i in S} w_i, B)`.
pub fn random_budget_additive_table(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| quarter(rng, 0, 8)).collect();
    let total: f64 = w.iter().sum();
    let cap = (total * rng.gen_range(0.3..1.0) * 4.0).floor() / 4.0;
    table_of(n, |s| s.total(&w).min(cap))
}

pub fn random_additive_table(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| quarter(rng, 0, 8)).collect();
    table_of(n, |s| s.total(&w))
}

/// Monotone submodular table drawn from coverage, budget-additive, additive
/// or a sum of two of them.
pub fn random_submodular_table(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let draw = |rng: &mut _, kind: u32| match kind {
        0 | 1 => random_coverage_table(rng, n),
        2 => random_budget_additive_table(rng, n),
        _ => random_additive_table(rng, n),
    };
    match rng.gen_range(0..10) {
        0..=3 => draw(rng, 0),
        4..=5 => draw(rng, 2),
        6 => draw(rng, 3),
        _ => {
            let (ka, kb) = (rng.gen_range(0..3), rng.gen_range(0..4));
            let a = draw(rng, ka);
            let b = draw(rng, kb);
            a.iter().zip(&b).map(|(x, y)| x + y).collect()
        }
    }
}

/// Threshold mixing `0`, `sigma(V)`, exact coalition values and interior points.
pub fn random_eta(rng: &mut impl Rng, table: &[f64]) -> f64 {
    let top = table[table.len() - 1];
    match rng.gen_range(0..4) {
        0 => 0.0,
        1 => top,
        2 => *table.choose(rng).expect("nonempty table"),
        _ => (rng.gen::<f64>() * top * 8.0).floor() / 8.0,
    }
}

/// Random table game with `n` in `n_lo..=n_hi` and mixed threshold.
pub fn random_table_game(rng: &mut impl Rng, n_lo: usize, n_hi: usize) -> Result<TruncatedGame> {
    let n = rng.gen_range(n_lo..=n_hi);
    let table = random_submodular_table(rng, n);
    let eta = random_eta(rng, &table);
    TruncatedGame::new(ProfitOracle::table(table)?, eta)
}

/// Same, with `eta = 0`.
pub fn random_eta_zero_game(rng: &mut impl Rng, n_lo: usize, n_hi: usize) -> Result<TruncatedGame> {
    let n = rng.gen_range(n_lo..=n_hi);
    TruncatedGame::new(ProfitOracle::table(random_submodular_table(rng, n))?, 0.0)
}

/// Cut function of a random weighted undirected graph: non-negative,
/// submodular, generally not monotone.
pub fn random_cut_function(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                let v = quarter(rng, 1, 8);
                w[i][j] = v;
                w[j][i] = v;
            }
        }
    }
    table_of(n, |s| {
        let mut cut = 0.0;
        for i in s.members() {
            for (j, wij) in w[i].iter().enumerate() {
                if !s.contains(j) {
                    cut += wij;
                }
            }
        }
        cut
    })
}

/// Erdős–Rényi graph `G(n, p)`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> UndirectedGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    UndirectedGraph::new(n, edges).expect("simple by construction")
}

/// `m` random clauses of width 1 or 2 over `n_vars` variables.
pub fn random_cnf(rng: &mut impl Rng, n_vars: usize, m: usize) -> CnfFormula {
    let lit = |rng: &mut dyn rand::RngCore| {
        let v = rng.gen_range(1..=n_vars as i64);
        if rng.gen_bool(0.5) {
            v
        } else {
            -v
        }
    };
    let clauses = (0..m)
        .map(|_| {
            let width = if n_vars > 1 && rng.gen_bool(0.6) { 2 } else { 1 };
            let mut c: Vec<i64> = Vec::new();
            while c.len() < width {
                let l = lit(rng);
                if !c.iter().any(|x| x.abs() == l.abs()) {
                    c.push(l);
                }
            }
            c
        })
        .collect();
    CnfFormula::new(n_vars, clauses).expect("literals in range")
}

/// Like [`random_cnf`] but every clause is satisfied by `planted`
/// (bit `i` is variable `i + 1`).
pub fn planted_cnf(rng: &mut impl Rng, n_vars: usize, m: usize, planted: u64) -> CnfFormula {
    let mut clauses = Vec::with_capacity(m);
    while clauses.len() < m {
        let f = random_cnf(rng, n_vars, 1);
        if f.evaluate(planted) {
            clauses.extend(f.clauses);
        }
    }
    CnfFormula::new(n_vars, clauses).expect("literals in range")
}

/// Formulas over one or two variables with 9-12 clauses; even positions
/// carry a planted satisfying assignment, odd positions are unconstrained
/// (and mostly unsatisfiable).
pub fn cnf_corpus(rng: &mut impl Rng, count: usize) -> Vec<CnfFormula> {
    (0..count)
        .map(|k| {
            let (n_vars, m) = (rng.gen_range(1..=2), rng.gen_range(9..=12));
            if k % 2 == 0 {
                let planted = rng.gen_range(0..1u64 << n_vars);
                planted_cnf(rng, n_vars, m, planted)
            } else {
                random_cnf(rng, n_vars, m)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{validate_oracle, OracleCheck};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tables_are_monotone_submodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let n = rng.gen_range(1..=7);
            let t = random_submodular_table(&mut rng, n);
            assert_eq!(validate_oracle(&t), OracleCheck::Ok);
            assert!(t.iter().all(|v| (v * 4.0).fract() == 0.0));
        }
    }

    #[test]
    fn cut_functions_are_submodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let t = random_cut_function(&mut rng, n);
            for s in Coalition::all(n) {
                for i in 0..n {
                    for j in 0..n {
                        if i != j && !s.contains(i) && !s.contains(j) {
                            let lhs = t[s.with(i).index()] + t[s.with(j).index()];
                            let rhs = t[s.with(i).with(j).index()] + t[s.index()];
                            assert!(lhs >= rhs - 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = cnf_corpus(&mut ChaCha8Rng::seed_from_u64(3), 10);
        let b = cnf_corpus(&mut ChaCha8Rng::seed_from_u64(3), 10);
        assert_eq!(a, b);
        assert!(a.iter().all(|f| f.n_clauses() >= 9 && f.n_clauses() <= 12));
        assert!(a.iter().step_by(2).all(|f| (0..4).any(|v| f.evaluate(v))));
    }
}
