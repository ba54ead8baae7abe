//! Subcommand implementations.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use coalition_core::alcv::{alcv_approx, alcv_exact, ReOptions};
use coalition_core::core_solver::{core_status, CoreReason, Verdict};
use coalition_core::game::ProfitSpec;
use coalition_core::ladv::{ladv_exact, sgd_ladv, trace_csv, SgdConfig};
use coalition_core::oracles;
use coalition_core::reductions::{
    domset_to_game, ic_game_file, maxcut_to_game, sat_threshold, sat_to_game, CnfFormula, SetCoverSpec,
    UndirectedGraph,
};
use coalition_core::report::SolveReport;
use coalition_core::rlcv::{adversarial_cover_value, rlcv_cut_generation, rlcv_eta_zero, rlcv_exact};
use coalition_core::spread::{SocialGraph, SpreadConfig};
use coalition_core::{Coalition, GameFile, TruncatedGame};
use serde_json::json;

use crate::{AlcvMethodArg, Command, Failure, GenKind, LadvMethodArg, Quantity, RlcvMethodArg};

/// Largest iteration count accepted from the `--theorem8 --epsilon` preset.
const MAX_SGD_ITERATIONS: f64 = 1e9;

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Parse(format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut text = String::new();
    std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::Parse(format!("stdin: {e}")))?;
    Ok(text)
}

fn load_game(path: Option<&Path>) -> Result<TruncatedGame, Failure> {
    Ok(GameFile::from_json(&read_input(path)?)?.to_game()?)
}

fn emit(report: SolveReport, started: Instant, summary: String) {
    let report = SolveReport { runtime_ms: started.elapsed().as_secs_f64() * 1e3, ..report };
    println!("{}", report.to_json());
    eprintln!("{summary}");
}

fn member_lists(sets: &[Coalition]) -> Vec<Vec<usize>> {
    sets.iter().map(|s| s.members().collect()).collect()
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
        _ => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn run(command: Command) -> Result<(), Failure> {
    let started = Instant::now();
    match command {
        Command::CoreCheck { game } => core_check(&load_game(game.as_deref())?, started),
        Command::Rlcv { game, method, max_rounds } => rlcv(&load_game(game.as_deref())?, method, max_rounds, started),
        Command::Alcv { game, method, delta, m_disc, no_exact_fallback, max_rounds } => {
            let opts = ReOptions { m_disc, exact_fallback: !no_exact_fallback, max_rounds };
            alcv(&load_game(game.as_deref())?, method, delta, &opts, started)
        }
        Command::Ladv { game, method, t, alpha, seed, theorem8, epsilon, trace } => {
            let game = load_game(game.as_deref())?;
            match method {
                LadvMethodArg::Exact => ladv_exact_cmd(&game, started),
                LadvMethodArg::Sgd => {
                    ladv_sgd_cmd(&game, SgdArgs { t, alpha, seed, theorem8, epsilon, trace }, started)
                }
            }
        }
        Command::Adversarial { game } => adversarial(&load_game(game.as_deref())?, started),
        Command::Gen { kind } => generate(kind),
        Command::Oracle { quantity, instance } => oracle(quantity, instance.as_deref(), started),
        Command::Spread { graph, seeds, samples, seed } => spread(graph.as_deref(), &seeds, samples, seed, started),
    }
}

fn core_check(game: &TruncatedGame, started: Instant) -> Result<(), Failure> {
    let status = core_status(game)?;
    let (verdict, summary) = match status.verdict {
        Verdict::Nonempty => ("nonempty", "core is nonempty"),
        Verdict::Empty => ("empty", "core is empty"),
    };
    let reason = match status.reason {
        CoreReason::VetoPlayer(_) => "veto_player",
        CoreReason::Additive => "additive",
        CoreReason::Neither => "neither",
    };
    let mut report = SolveReport::new("core_status", verdict)
        .certificate(status.reason)
        .guarantee("exact")
        .with("verdict", verdict)
        .with("reason", reason);
    if let Some(x) = &status.allocation {
        report = report.allocation(x.as_slice());
    }
    emit(report, started, format!("{summary} ({reason})"));
    Ok(())
}

fn rlcv(game: &TruncatedGame, method: RlcvMethodArg, max_rounds: usize, started: Instant) -> Result<(), Failure> {
    let res = match method {
        RlcvMethodArg::EtaZero => rlcv_eta_zero(game)?,
        RlcvMethodArg::Exact => rlcv_exact(game)?,
        RlcvMethodArg::Cutgen => rlcv_cut_generation(game, max_rounds)?,
    };
    let method = serde_json::to_value(res.method).expect("method serializes");
    let report = SolveReport::new(method.as_str().unwrap_or("rlcv"), res.r)
        .allocation(res.x.as_slice())
        .certificate(json!({ "tight_coalitions": member_lists(&res.tight_coalitions) }))
        .guarantee("exact")
        .with("rounds", res.rounds)
        .with("rows", res.rows);
    emit(report, started, format!("RLCV = {} ({} LP rounds)", res.r, res.rounds));
    Ok(())
}

fn alcv(
    game: &TruncatedGame,
    method: AlcvMethodArg,
    delta: f64,
    opts: &ReOptions,
    started: Instant,
) -> Result<(), Failure> {
    match method {
        AlcvMethodArg::Exact => {
            let res = alcv_exact(game)?;
            let report = SolveReport::new("alcv_exact", res.eps)
                .allocation(res.x.as_slice())
                .certificate(json!({ "tight_coalitions": member_lists(&res.tight_coalitions) }))
                .guarantee("exact");
            emit(report, started, format!("ALCV = {}", res.eps));
        }
        AlcvMethodArg::Approx => {
            let res = alcv_approx(game, delta, opts)?;
            let report = SolveReport::new("alcv_approx", res.eps_prime)
                .allocation(res.x.as_slice())
                .certificate(json!({
                    "branch": res.branch,
                    "eps_re": res.eps_re,
                    "eps_str": res.eps_str,
                    "str_rounds": res.str_rounds,
                    "re_stats": res.re_stats,
                }))
                .guarantee(res.guarantee)
                .with("delta", res.delta);
            emit(report, started, format!("ALCV approx = {} via {:?} branch", res.eps_prime, res.branch));
        }
    }
    Ok(())
}

fn ladv_exact_cmd(game: &TruncatedGame, started: Instant) -> Result<(), Failure> {
    let res = ladv_exact(game)?;
    let report = SolveReport::new("ladv_exact", res.value)
        .allocation(res.x.as_slice())
        .certificate(json!({ "cut_rounds": res.iterations }))
        .guarantee("exact");
    emit(report, started, format!("LADV = {}", res.value));
    Ok(())
}

struct SgdArgs {
    t: u64,
    alpha: Option<f64>,
    seed: u64,
    theorem8: bool,
    epsilon: Option<f64>,
    trace: Option<PathBuf>,
}

fn ladv_sgd_cmd(game: &TruncatedGame, args: SgdArgs, started: Instant) -> Result<(), Failure> {
    let top = game.grand_value()?;
    let n = game.n();
    let mut t = args.t;
    if let (true, Some(eps)) = (args.theorem8, args.epsilon) {
        if !(eps > 0.0) {
            return Err(Failure::Usage(format!("--epsilon must be positive, got {eps}")));
        }
        let needed = SgdConfig::theorem8_iterations(top, n, eps);
        if needed > MAX_SGD_ITERATIONS {
            return Err(Failure::Limit(format!(
                "the iteration bound for epsilon = {eps} is {needed:e}, above the limit of {MAX_SGD_ITERATIONS:e}"
            )));
        }
        t = (needed as u64).max(1);
    }
    let alpha = match args.alpha {
        Some(a) if !args.theorem8 => a,
        _ => SgdConfig::theorem8_alpha(top, n, t.max(1)),
    };
    let cfg = SgdConfig { t, alpha, master_seed: args.seed, record_trace: args.trace.is_some() };
    let res = sgd_ladv(game, &cfg)?;
    if let (Some(path), Some(rows)) = (&args.trace, &res.trace) {
        std::fs::write(path, trace_csv(rows)).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    let guarantee = if args.theorem8 && args.epsilon.is_some() {
        format!("E[F(x)] - LADV <= {} in expectation", args.epsilon.unwrap_or_default())
    } else {
        "upper bound on LADV (best iterate)".to_string()
    };
    let mut report = SolveReport::new("ladv_sgd", res.value)
        .allocation(res.x.as_slice())
        .certificate(json!({ "best_iteration": res.iterations }))
        .guarantee(guarantee)
        .with("T", t)
        .with("alpha", alpha)
        .with("seed", args.seed);
    if let Some(se) = res.std_error {
        report = report.with("std_error", se);
    }
    emit(report, started, format!("LADV (sgd, T = {t}) = {}", res.value));
    Ok(())
}

fn adversarial(game: &TruncatedGame, started: Instant) -> Result<(), Failure> {
    let res = adversarial_cover_value(game)?;
    let report = SolveReport::new("adversarial_cover", res.value)
        .allocation(res.x.as_slice())
        .certificate(json!({ "budget": res.budget, "implied_rlcv": res.implied_rlcv }))
        .guarantee("exact");
    emit(report, started, format!("adversarial covering value = {} of {}", res.value, res.budget));
    Ok(())
}

fn generate(kind: GenKind) -> Result<(), Failure> {
    let (file, out) = match kind {
        GenKind::Sat { input, output } => {
            let f = CnfFormula::from_dimacs_str(&read_input(input.as_deref())?)?;
            let (graph, game) = sat_to_game(&f)?;
            let meta = json!({
                "reduction": "sat",
                "variables": f.n_vars,
                "clauses": f.n_clauses(),
                "threshold": sat_threshold(f.n_vars, f.n_clauses()),
            });
            (ic_game_file(&graph, game.eta(), Some(meta)), output)
        }
        GenKind::Maxcut { input, output } => {
            let g = UndirectedGraph::from_edge_list(&read_input(input.as_deref())?)?;
            let (graph, game) = maxcut_to_game(&g)?;
            (ic_game_file(&graph, game.eta(), Some(json!({ "reduction": "maxcut" }))), output)
        }
        GenKind::Domset { input, k, output } => {
            let g = UndirectedGraph::from_edge_list(&read_input(input.as_deref())?)?;
            let (graph, game, candidate) = domset_to_game(&g, k)?;
            let meta = json!({ "reduction": "domset", "candidate": candidate });
            (ic_game_file(&graph, game.eta(), Some(meta)), output)
        }
        GenKind::Setcover { input, output } => {
            let spec: SetCoverSpec = serde_json::from_str(&read_input(input.as_deref())?)
                .map_err(|e| Failure::Parse(format!("set cover spec, line {}: {e}", e.line())))?;
            (spec.game_file()?, output)
        }
    };
    eprintln!("generated game with {} players, eta = {}", file.n, file.eta);
    write_output(out.as_deref(), &file.to_json())
}

fn oracle(quantity: Quantity, instance: Option<&Path>, started: Instant) -> Result<(), Failure> {
    let text = read_input(instance)?;
    let game = || -> Result<TruncatedGame, Failure> { Ok(GameFile::from_json(&text)?.to_game()?) };
    let graph = || -> Result<UndirectedGraph, Failure> { Ok(UndirectedGraph::from_edge_list(&text)?) };
    let (name, value) = match quantity {
        Quantity::Core => ("brute_core_feasible", json!(oracles::brute_core_feasible(&game()?)?)),
        Quantity::Rlcv => ("brute_rlcv", json!(oracles::brute_rlcv(&game()?)?.max(0.0))),
        Quantity::Alcv => ("brute_alcv", json!(oracles::brute_alcv(&game()?)?)),
        Quantity::AlcvRe => ("brute_alcv_re", json!(oracles::brute_alcv_re(&game()?)?)),
        Quantity::AlcvStr => ("brute_alcv_str", json!(oracles::brute_alcv_str(&game()?)?)),
        Quantity::Ladv => ("brute_ladv", json!(oracles::brute_ladv(&game()?)?)),
        Quantity::Maxcut => ("brute_max_cut", json!(oracles::brute_max_cut(&graph()?)?)),
        Quantity::Domset => ("brute_min_dominating_set", json!(oracles::brute_min_dominating_set(&graph()?)?)),
        Quantity::Sat => ("brute_sat", json!(oracles::brute_sat(&CnfFormula::from_dimacs_str(&text)?)?)),
    };
    let summary = format!("{name} = {value}");
    emit(SolveReport::new(name, value).guarantee("exact (enumeration)"), started, summary);
    Ok(())
}

fn spread(
    path: Option<&Path>,
    seeds: &[u64],
    samples: Option<u64>,
    master_seed: u64,
    started: Instant,
) -> Result<(), Failure> {
    let text = read_input(path)?;
    let graph: SocialGraph = match serde_json::from_str(&text) {
        Ok(g) => g,
        Err(_) => match GameFile::from_json(&text)?.profit {
            ProfitSpec::IcGraph { graph, .. } => graph,
            _ => return Err(Failure::Parse("expected a social graph or an ic_graph game file".into())),
        },
    };
    let players = seeds
        .iter()
        .map(|id| {
            graph
                .seeds
                .iter()
                .position(|s| s == id)
                .ok_or_else(|| Failure::Usage(format!("node {id} is not a seed of the graph")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let s = Coalition::from_players(graph.seeds.len(), players)?;
    let compiled = graph.compile()?;
    let (cfg, method) = match samples {
        Some(k) => (SpreadConfig::monte_carlo(k, master_seed), "mc_spread"),
        None => (SpreadConfig::default(), "exact_spread"),
    };
    cfg.validate()?;
    let value = compiled.spread(s, &cfg)?;
    let guarantee = match samples {
        Some(k) => format!("unbiased Monte Carlo estimate from {k} live-edge samples"),
        None => "exact".to_string(),
    };
    let report = SolveReport::new(method, value)
        .certificate(json!({ "seeds": seeds }))
        .guarantee(guarantee)
        .with("master_seed", master_seed);
    emit(report, started, format!("spread of {} seeds = {value}", seeds.len()));
    Ok(())
}
