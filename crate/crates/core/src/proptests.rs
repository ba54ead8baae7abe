//! Property tests tying the solvers to the brute-force references.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alcv::{alcv_exact, double_greedy_max, lfp_partial_oracle, LfpVerdict};
use crate::coalition::Coalition;
use crate::core_solver::{core_status, find_veto_players, is_additive_grand, verify_core_allocation, CoreCheck, Verdict};
use crate::game::{ProfitOracle, TruncatedGame};
use crate::instances::{random_cut_function, random_table_game};
use crate::ladv::{project_to_budget_simplex, random_budget_point, sgd_ladv, ProfitTable, SgdConfig};
use crate::linopt::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::oracles;
use crate::report::SolveReport;
use crate::rlcv::{adversarial_cover_value, rlcv_cut_generation, rlcv_eta_zero, rlcv_exact, separate_rlcv};
use crate::spread::{exact_spread, mc_spread, SocialGraph, SpreadConfig};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn game(seed: u64, n_hi: usize) -> TruncatedGame {
    random_table_game(&mut rng(seed), 1, n_hi).unwrap()
}

fn with_eta(g: &TruncatedGame, eta: f64) -> TruncatedGame {
    TruncatedGame::new(ProfitOracle::table(g.tabulate().unwrap()).unwrap(), eta).unwrap()
}

/// Seeds feed targets, targets feed later targets; edge probabilities in quarters.
fn random_social_graph(seed: u64, players: usize, targets: usize) -> SocialGraph {
    let mut r = rng(seed);
    let seeds: Vec<u64> = (0..players as u64).collect();
    let nodes: Vec<u64> = (players as u64..(players + targets) as u64).collect();
    let mut edges = Vec::new();
    for &a in seeds.iter().chain(&nodes) {
        for &b in &nodes {
            if a < b && edges.len() < 10 && r.gen_bool(0.35) {
                edges.push((a, b, r.gen_range(1..=4) as f64 / 4.0));
            }
        }
    }
    SocialGraph { seeds, targets: nodes, edges }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_sandwiched(seed in any::<u64>()) {
        let g = game(seed, 8);
        let top = g.grand_value().unwrap();
        prop_assert_eq!(g.truncated_profit(g.grand()).unwrap(), top);
        let x = random_budget_point(&mut rng(seed ^ 1), g.n(), top);
        let all: Vec<_> = Coalition::all(g.n()).collect();
        prop_assert_eq!(all.len(), 1 << g.n());
        for s in all {
            let (f, v) = (g.truncated_profit(s).unwrap(), g.sigma(s).unwrap());
            prop_assert!(0.0 <= f && f <= v && v <= top);
            if s.total(&x) >= v {
                prop_assert_eq!(g.dissatisfaction(s, &x).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn spread_is_monotone_and_submodular(seed in any::<u64>(), players in 1usize..=4, targets in 1usize..=5) {
        let sg = random_social_graph(seed, players, targets);
        let val: Vec<f64> = Coalition::all(players).map(|s| exact_spread(&sg, s).unwrap()).collect();
        for s in Coalition::all(players) {
            for i in (0..players).filter(|&i| !s.contains(i)) {
                prop_assert!(val[s.with(i).index()] >= val[s.index()] - 1e-12);
                for t in Coalition::all(players).filter(|t| s.is_subset_of(*t) && !t.contains(i)) {
                    let gain_s = val[s.with(i).index()] - val[s.index()];
                    let gain_t = val[t.with(i).index()] - val[t.index()];
                    prop_assert!(gain_s >= gain_t - 1e-12);
                }
            }
        }
    }

    #[test]
    fn core_verdict_matches_full_system(seed in any::<u64>()) {
        let g = game(seed, 8);
        let status = core_status(&g).unwrap();
        let feasible = oracles::brute_core_feasible(&g).unwrap();
        prop_assert_eq!(status.verdict == Verdict::Nonempty, feasible);
        prop_assert_eq!(status.allocation.is_some(), feasible);
        if let Some(x) = &status.allocation {
            prop_assert_eq!(verify_core_allocation(&g, x.as_slice()).unwrap(), CoreCheck::Ok);
        }
        if !find_veto_players(&g).unwrap().is_empty() {
            prop_assert_eq!(status.verdict, Verdict::Nonempty);
        }
    }

    #[test]
    fn additive_grand_means_additive_everywhere(seed in any::<u64>()) {
        let g = game(seed, 7);
        if is_additive_grand(&g, 1e-12).unwrap() {
            let singles: Vec<f64> = (0..g.n()).map(|i| g.sigma(g.singleton(i)).unwrap()).collect();
            for s in Coalition::all(g.n()) {
                prop_assert!(close(g.sigma(s).unwrap(), s.total(&singles), 1e-12));
            }
        }
    }

    #[test]
    fn random_lps_satisfy_strong_duality(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=6) {
        let mut r = rng(seed);
        let c: Vec<f64> = (0..n).map(|_| r.gen_range(1..=8) as f64).collect();
        let mut lp = LinearProgram::minimize(c.clone());
        let mut rows = Vec::new();
        for k in 0..m {
            let a: Vec<f64> = (0..n).map(|_| r.gen_range(0..=4) as f64).collect();
            let b = r.gen_range(0..=10) as f64;
            let rel = if k == 0 { Relation::Eq } else { Relation::Ge };
            let a = if a.iter().all(|v| *v == 0.0) { vec![1.0; n] } else { a };
            lp.add(a.clone(), rel, b);
            rows.push((a, b));
        }
        if let LpOutcome::Optimal(sol) = solve_lp(&lp).unwrap() {
            let dual: f64 = rows.iter().zip(&sol.duals).map(|((_, b), y)| b * y).sum();
            prop_assert!(close(sol.value, dual, 1e-6), "primal {} dual {}", sol.value, dual);
            for (j, cj) in c.iter().enumerate() {
                let reduced = cj - rows.iter().zip(&sol.duals).map(|((a, _), y)| a[j] * y).sum::<f64>();
                prop_assert!(reduced >= -1e-6);
            }
            prop_assert!(sol.duals[1..].iter().all(|y| *y >= -1e-9));
        }
    }

    #[test]
    fn rlcv_cut_generation_matches_enumeration(seed in any::<u64>()) {
        let g = game(seed, 8);
        let full = rlcv_exact(&g).unwrap();
        let cut = rlcv_cut_generation(&g, 10_000).unwrap();
        prop_assert!(close(full.r, cut.r, 1e-7), "exact {} cutgen {}", full.r, cut.r);
        prop_assert!(close(full.r, oracles::brute_rlcv(&g).unwrap().max(0.0), 1e-7));
        prop_assert!((0.0..=1.0).contains(&full.r));
        prop_assert_eq!(full.r <= 1e-9, core_status(&g).unwrap().verdict == Verdict::Nonempty);
    }

    #[test]
    fn separation_cuts_off_the_query(seed in any::<u64>()) {
        let g = game(seed, 8);
        let top = g.grand_value().unwrap();
        let x = random_budget_point(&mut rng(seed ^ 2), g.n(), top);
        let r = rng(seed ^ 3).gen_range(0.0..1.0);
        match separate_rlcv(&g, &x, r).unwrap() {
            Some(s) => {
                let v = g.sigma(s).unwrap();
                prop_assert!(g.reaches_eta(v));
                prop_assert!(s.total(&x) + v * r < v);
            }
            None => prop_assert!(oracles::brute_rlcv_point_feasible(&g, &x, r, 1e-9).unwrap()),
        }
    }

    #[test]
    fn eta_zero_rlcv_uses_singletons(seed in any::<u64>()) {
        let g = with_eta(&game(seed, 8), 0.0);
        prop_assert!(close(rlcv_eta_zero(&g).unwrap().r, rlcv_exact(&g).unwrap().r, 1e-6));
    }

    #[test]
    fn adversarial_cover_is_complement_of_rlcv(seed in any::<u64>()) {
        let base = game(seed, 8);
        let g = with_eta(&base, base.grand_value().unwrap());
        let adv = adversarial_cover_value(&g).unwrap();
        let r = rlcv_exact(&g).unwrap().r;
        prop_assert!(close(adv.value, (1.0 - r) * adv.budget, 1e-7));
    }

    #[test]
    fn relaxed_and_strengthened_programs_bracket_the_primal(seed in any::<u64>()) {
        let g = game(seed, 8);
        let top = g.grand_value().unwrap();
        let p = oracles::brute_alcv(&g).unwrap().max(0.0);
        let re = oracles::brute_alcv_re(&g).unwrap();
        let st = oracles::brute_alcv_str(&g).unwrap().max(0.0);
        let tol = 1e-7 * top.max(1.0);
        prop_assert!(re <= p + tol && p <= re + top - g.eta() + tol, "re {re} p {p}");
        prop_assert!(p <= st + tol && st <= p.max(g.eta()) + tol, "p {p} str {st}");
        prop_assert!(close(alcv_exact(&g).unwrap().eps, p, 1e-7));
    }

    #[test]
    fn double_greedy_is_a_third_approximation(seed in any::<u64>(), n in 1usize..=8) {
        let table = random_cut_function(&mut rng(seed), n);
        let mut calls = 0;
        let out = double_greedy_max::<(), _>(n, |s| {
            calls += 1;
            Ok(table[s.index()])
        })
        .unwrap();
        let (opt, _) = oracles::brute_submodular_max(n, |s| Ok(table[s.index()])).unwrap();
        prop_assert!(calls <= 2 * n);
        prop_assert_eq!(out.evaluations, calls);
        prop_assert!(out.value >= opt / 3.0 - 1e-12);
    }

    #[test]
    fn lfp_oracle_never_mislabels(seed in any::<u64>(), k in 1usize..=6, fallback in any::<bool>()) {
        let mut r = rng(seed);
        let g = game(seed, 8);
        // Without fallback the DP is only guaranteed complete on additive profits.
        let g = if fallback {
            g
        } else {
            let w: Vec<f64> = (0..g.n()).map(|_| r.gen_range(0..=8) as f64 / 4.0).collect();
            let top: f64 = w.iter().sum();
            let eta = (r.gen::<f64>() * top * 4.0).floor() / 4.0;
            TruncatedGame::new(ProfitOracle::additive(w).unwrap(), eta).unwrap()
        };
        let top = g.grand_value().unwrap();
        prop_assume!(top > 0.0);
        let n = g.n();
        let x = random_budget_point(&mut r, n, top);
        let delta = top / r.gen_range(2..=12) as f64;
        let successful: Vec<Coalition> =
            Coalition::all(n).filter(|s| !s.is_empty() && g.is_successful(*s).unwrap()).collect();
        let out = lfp_partial_oracle(&g, &x, k, delta, n, fallback).unwrap();
        match out.verdict {
            LfpVerdict::Violated(s) => {
                prop_assert!(g.is_successful(s).unwrap() && s.total(&x) < k as f64 * delta);
            }
            LfpVerdict::FeasibleForK => {
                prop_assert!(successful.iter().all(|s| s.total(&x) >= k as f64 * delta - 1e-8));
            }
            LfpVerdict::FeasibleForKMinus1 => {
                let bar = (k - 1) as f64 * delta;
                prop_assert!(successful.iter().all(|s| s.total(&x) >= bar - 1e-8));
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_nearest(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let y: Vec<f64> = (0..n).map(|_| r.gen_range(-3.0..3.0)).collect();
        let total = r.gen_range(0.0..5.0);
        let p = project_to_budget_simplex(&y, total).unwrap().0;
        prop_assert!(close(p.iter().sum::<f64>(), total, 1e-9) && p.iter().all(|v| *v >= 0.0));
        let pp = project_to_budget_simplex(&p, total).unwrap().0;
        prop_assert!(p.iter().zip(&pp).all(|(a, b)| (a - b).abs() < 1e-12));
        let dist = |z: &[f64]| y.iter().zip(z).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        for _ in 0..50 {
            let z = random_budget_point(&mut r, n, total);
            prop_assert!(dist(&p) <= dist(&z) + 1e-9);
        }
    }

    #[test]
    fn average_dissatisfaction_is_convex(seed in any::<u64>()) {
        let g = game(seed, 8);
        let top = g.grand_value().unwrap();
        let table = ProfitTable::new(&g).unwrap();
        let mut r = rng(seed ^ 4);
        for _ in 0..50 {
            let a = random_budget_point(&mut r, g.n(), top);
            let b = random_budget_point(&mut r, g.n(), top);
            let t: f64 = r.gen();
            let mid: Vec<f64> = a.iter().zip(&b).map(|(p, q)| t * p + (1.0 - t) * q).collect();
            let rhs = t * table.average_dissatisfaction(&a) + (1.0 - t) * table.average_dissatisfaction(&b);
            prop_assert!(table.average_dissatisfaction(&mid) <= rhs + 1e-9);
        }
    }

    #[test]
    fn averaged_step_direction_is_a_subgradient(seed in any::<u64>()) {
        let g = game(seed, 6);
        let n = g.n();
        let top = g.grand_value().unwrap();
        prop_assume!(top > 0.0);
        let table = ProfitTable::new(&g).unwrap();
        let x = random_budget_point(&mut rng(seed ^ 5), n, top);
        let gaps: Vec<f64> = Coalition::all(n).map(|s| table.profit(s) - s.total(&x)).collect();
        // Finite differences are only valid away from kinks; `V` always sits
        // on one, so only budget-preserving directions `e_i - e_j` are probed.
        let grand = g.grand().index();
        prop_assume!(gaps.iter().enumerate().all(|(i, gap)| i == 0 || i == grand || gap.abs() > 1e-4));
        let scale = 1.0 / (1u64 << n) as f64;
        let mut grad = vec![0.0; n];
        for s in Coalition::all(n).filter(|s| !s.is_empty() && gaps[s.index()] >= 0.0) {
            for i in s.members() {
                grad[i] -= scale;
            }
        }
        let h = 1e-7;
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let mut xp = x.clone();
                xp[i] += h;
                xp[j] -= h;
                let fd = (table.average_dissatisfaction(&xp) - table.average_dissatisfaction(&x)) / h;
                let expected = grad[i] - grad[j];
                prop_assert!((fd - expected).abs() < 1e-6, "direction {i}-{j}: fd {fd} subgradient {expected}");
            }
        }
    }

    #[test]
    fn best_iterate_never_worsens_with_more_steps(seed in any::<u64>(), t in 1u64..400) {
        let g = game(seed, 6);
        let top = g.grand_value().unwrap();
        let alpha = top.max(1.0) / 50.0;
        let short = sgd_ladv(&g, &SgdConfig { t, alpha, master_seed: seed, record_trace: false }).unwrap();
        let long = sgd_ladv(&g, &SgdConfig { t: t + 50, alpha, master_seed: seed, record_trace: false }).unwrap();
        prop_assert!(long.value <= short.value);
        prop_assert!(short.value >= oracles::brute_ladv(&g).unwrap() - 1e-7);
    }

    #[test]
    fn reports_round_trip(value in -1e6f64..1e6, x in prop::collection::vec(0.0f64..10.0, 0..6), tag in "[a-z]{1,8}") {
        let report = SolveReport::new(tag.clone(), value).allocation(&x).with("tag", &tag).guarantee("exact");
        let back: SolveReport = serde_json::from_str(&report.to_json()).unwrap();
        prop_assert_eq!(back, report);
    }
}

#[test]
fn monte_carlo_spread_is_unbiased() {
    for seed in 0..5 {
        let sg = random_social_graph(seed, 3, 4);
        let s = Coalition::grand(3);
        let exact = exact_spread(&sg, s).unwrap();
        let runs: Vec<f64> =
            (0..200).map(|k| mc_spread(&sg, s, &SpreadConfig::monte_carlo(200, seed * 1000 + k)).unwrap()).collect();
        let mean = runs.iter().sum::<f64>() / runs.len() as f64;
        let var = runs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs.len() - 1) as f64;
        let se = (var / runs.len() as f64).sqrt();
        assert!((mean - exact).abs() <= 3.0 * se + 1e-12, "seed {seed}: mean {mean} exact {exact} se {se}");
    }
}
