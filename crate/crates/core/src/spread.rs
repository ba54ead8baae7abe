//! Influence spread under the independent cascade model.
//!
//! Everything here uses the live-edge formulation: each edge is live with its
//! probability, independently, and the activated set is what the seeds reach
//! through live edges. Only target nodes are counted.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};

pub type NodeId = u64;

/// Directed influence graph with a seed (player) / target partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialGraph {
    pub seeds: Vec<NodeId>,
    pub targets: Vec<NodeId>,
    pub edges: Vec<(NodeId, NodeId, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpreadMode {
    #[default]
    Exact,
    MonteCarlo,
}

pub const DEFAULT_MAX_PROBABILISTIC_EDGES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpreadConfig {
    pub mode: SpreadMode,
    pub max_probabilistic_edges: usize,
    pub samples: u64,
    pub master_seed: u64,
}

impl Default for SpreadConfig {
    fn default() -> Self {
        Self {
            mode: SpreadMode::Exact,
            max_probabilistic_edges: DEFAULT_MAX_PROBABILISTIC_EDGES,
            samples: 10_000,
            master_seed: 0,
        }
    }
}

impl SpreadConfig {
    pub fn monte_carlo(samples: u64, master_seed: u64) -> Self {
        Self { mode: SpreadMode::MonteCarlo, samples, master_seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == SpreadMode::MonteCarlo && self.samples == 0 {
            return Err(Error::InvalidParameter("monte_carlo mode needs samples >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    dst: usize,
    p: f64,
    /// Position among the strictly probabilistic edges, if any.
    coin: Option<usize>,
}

/// Validated graph with dense node indices, ready for spread evaluation.
#[derive(Debug, Clone)]
pub struct InfluenceGraph {
    source: SocialGraph,
    out: Vec<Vec<Arc>>,
    is_target: Vec<bool>,
    player_node: Vec<usize>,
    coin_probs: Vec<f64>,
    /// Every probabilistic edge ends in a node with no live-able out-edges.
    sink_closed: bool,
}

impl SocialGraph {
    pub fn compile(&self) -> Result<InfluenceGraph> {
        InfluenceGraph::new(self.clone())
    }
}

impl InfluenceGraph {
    pub fn new(source: SocialGraph) -> Result<Self> {
        let mut index = HashMap::new();
        for &id in source.seeds.iter().chain(&source.targets) {
            if index.insert(id, index.len()).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "node id {id} listed twice (seeds and targets must be disjoint)"
                )));
            }
        }
        if source.seeds.len() > crate::coalition::MAX_PLAYERS {
            return Err(Error::TooManyPlayers {
                what: "social graph",
                max: crate::coalition::MAX_PLAYERS,
                n: source.seeds.len(),
            });
        }
        let nodes = index.len();
        let mut out = vec![Vec::new(); nodes];
        let mut coin_probs = Vec::new();
        for &(src, dst, p) in &source.edges {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidGraph(format!("edge ({src},{dst}) has probability {p}")));
            }
            let (Some(&s), Some(&d)) = (index.get(&src), index.get(&dst)) else {
                return Err(Error::InvalidGraph(format!("edge ({src},{dst}) uses an unknown node")));
            };
            if p == 0.0 {
                continue;
            }
            let coin = (p < 1.0).then(|| {
                coin_probs.push(p);
                coin_probs.len() - 1
            });
            out[s].push(Arc { dst: d, p, coin });
        }
        let sink_closed = out.iter().flatten().filter(|a| a.coin.is_some()).all(|a| out[a.dst].is_empty());
        let mut is_target = vec![false; nodes];
        for t in &source.targets {
            is_target[index[t]] = true;
        }
        let player_node = source.seeds.iter().map(|id| index[id]).collect();
        Ok(Self { source, out, is_target, player_node, coin_probs, sink_closed })
    }

    pub fn source(&self) -> &SocialGraph {
        &self.source
    }

    pub fn n_players(&self) -> usize {
        self.player_node.len()
    }

    pub fn n_targets(&self) -> usize {
        self.source.targets.len()
    }

    pub fn probabilistic_edges(&self) -> usize {
        self.coin_probs.len()
    }

    fn check_width(&self, s: Coalition) -> Result<()> {
        if s.width() != self.n_players() {
            return Err(Error::WidthMismatch { expected: self.n_players(), found: s.width() });
        }
        Ok(())
    }

    /// Nodes reachable from the seed set through edges accepted by `live`.
    fn reach(&self, s: Coalition, live: impl Fn(&Arc) -> bool, seen: &mut [bool]) {
        seen.iter_mut().for_each(|v| *v = false);
        let mut stack: Vec<usize> = s.members().map(|i| self.player_node[i]).collect();
        for &u in &stack {
            seen[u] = true;
        }
        while let Some(u) = stack.pop() {
            for arc in &self.out[u] {
                if !seen[arc.dst] && live(arc) {
                    seen[arc.dst] = true;
                    stack.push(arc.dst);
                }
            }
        }
    }

    fn count_targets(&self, seen: &[bool]) -> u64 {
        seen.iter().zip(&self.is_target).filter(|(a, b)| **a && **b).count() as u64
    }

    /// Exact expected number of activated targets.
    ///
    /// When every probabilistic edge points into a sink, the deterministic
    /// reach is fixed and each remaining sink target is activated
    /// independently with probability `1 - prod(1 - p)` over its probabilistic
    /// in-edges from reached nodes. Otherwise all `2^k` realizations of the
    /// `k` probabilistic edges are enumerated, subject to `cap`.
    pub fn exact_spread(&self, s: Coalition, cap: usize) -> Result<f64> {
        self.check_width(s)?;
        if s.is_empty() {
            return Ok(0.0);
        }
        let mut seen = vec![false; self.out.len()];
        if self.sink_closed {
            return Ok(self.closed_form_spread(s, &mut seen));
        }
        let k = self.coin_probs.len();
        if k > cap {
            return Err(Error::TooManyProbabilisticEdges { found: k, cap });
        }
        Ok(self.enumerated_spread(s, &mut seen))
    }

    fn closed_form_spread(&self, s: Coalition, seen: &mut [bool]) -> f64 {
        self.reach(s, |a| a.coin.is_none(), seen);
        let mut survive: HashMap<usize, f64> = HashMap::new();
        for (u, arcs) in self.out.iter().enumerate() {
            if !seen[u] {
                continue;
            }
            for arc in arcs.iter().filter(|a| a.coin.is_some()) {
                if !seen[arc.dst] && self.is_target[arc.dst] {
                    *survive.entry(arc.dst).or_insert(1.0) *= 1.0 - arc.p;
                }
            }
        }
        let mut dsts: Vec<_> = survive.into_iter().collect();
        dsts.sort_by_key(|&(d, _)| d);
        self.count_targets(seen) as f64 + dsts.iter().map(|&(_, q)| 1.0 - q).sum::<f64>()
    }

    fn enumerated_spread(&self, s: Coalition, seen: &mut [bool]) -> f64 {
        let k = self.coin_probs.len();
        let mut total = 0.0;
        for mask in 0u64..1 << k {
            let weight: f64 = self
                .coin_probs
                .iter()
                .enumerate()
                .map(|(i, &p)| if mask >> i & 1 == 1 { p } else { 1.0 - p })
                .product();
            if weight == 0.0 {
                continue;
            }
            self.reach(s, |a| a.coin.is_none_or(|c| mask >> c & 1 == 1), seen);
            total += weight * self.count_targets(seen) as f64;
        }
        total
    }

    /// Same as [`exact_spread`](Self::exact_spread) but always enumerates realizations.
    pub fn enumerated_spread_only(&self, s: Coalition, cap: usize) -> Result<f64> {
        self.check_width(s)?;
        let k = self.coin_probs.len();
        if k > cap {
            return Err(Error::TooManyProbabilisticEdges { found: k, cap });
        }
        Ok(self.enumerated_spread(s, &mut vec![false; self.out.len()]))
    }

    /// Activated targets in one live-edge sample drawn from `rng`.
    fn sample_once(&self, s: Coalition, rng: &mut ChaCha8Rng, seen: &mut [bool]) -> u64 {
        let live: Vec<bool> = self.coin_probs.iter().map(|&p| rng.gen::<f64>() < p).collect();
        self.reach(s, |a| a.coin.is_none_or(|c| live[c]), seen);
        self.count_targets(seen)
    }

    /// Monte Carlo estimate; sample `r` uses a child seed of `(master_seed, r)`
    /// so the result does not depend on how samples are scheduled.
    pub fn mc_spread(&self, s: Coalition, samples: u64, master_seed: u64) -> Result<f64> {
        self.check_width(s)?;
        if samples == 0 {
            return Err(Error::InvalidParameter("samples must be >= 1".into()));
        }
        if s.is_empty() {
            return Ok(0.0);
        }
        let nodes = self.out.len();
        let total: u64 = (0..samples)
            .into_par_iter()
            .map_init(
                || vec![false; nodes],
                |seen, r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(child_seed(master_seed, r));
                    self.sample_once(s, &mut rng, seen)
                },
            )
            .sum();
        Ok(total as f64 / samples as f64)
    }

    pub fn spread(&self, s: Coalition, cfg: &SpreadConfig) -> Result<f64> {
        match cfg.mode {
            SpreadMode::Exact => self.exact_spread(s, cfg.max_probabilistic_edges),
            SpreadMode::MonteCarlo => self.mc_spread(s, cfg.samples, cfg.master_seed),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index))
}

pub fn exact_spread(g: &SocialGraph, s: Coalition) -> Result<f64> {
    g.compile()?.exact_spread(s, DEFAULT_MAX_PROBABILISTIC_EDGES)
}

pub fn mc_spread(g: &SocialGraph, s: Coalition, cfg: &SpreadConfig) -> Result<f64> {
    cfg.validate()?;
    g.compile()?.mc_spread(s, cfg.samples, cfg.master_seed)
}
