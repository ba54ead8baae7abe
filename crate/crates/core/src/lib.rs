//! Solvers for cooperative games whose profit is a truncated monotone
//! submodular function: core emptiness, relative and absolute least-core
//! values, least average dissatisfaction, plus hardness-reduction generators
//! and brute-force reference oracles.

pub mod alcv;
pub mod coalition;
pub mod core_solver;
pub mod error;
pub mod game;
pub mod instances;
pub mod ladv;
pub mod linopt;
pub mod oracles;
#[cfg(test)]
mod proptests;
pub mod reductions;
pub mod report;
pub mod rlcv;
pub mod spread;

pub use coalition::Coalition;
pub use error::{Error, Result};
pub use game::{Allocation, GameFile, ProfitOracle, TruncatedGame};
