use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coalition width {found} does not match game with {expected} players")]
    WidthMismatch { expected: usize, found: usize },

    #[error("player {player} out of range for {n} players")]
    PlayerOutOfRange { player: usize, n: usize },

    #[error("{what} supports at most {max} players, got {n}")]
    TooManyPlayers { what: &'static str, max: usize, n: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error(
        "exact spread needs {found} probabilistic edges but the cap is {cap}; use monte_carlo mode"
    )]
    TooManyProbabilisticEdges { found: usize, cap: usize },

    #[error("method `{method}` requires {requirement}")]
    WrongMethod { method: &'static str, requirement: String },

    #[error("cut generation hit the round limit ({rounds} rounds)")]
    RoundLimit { rounds: usize },

    #[error("separation oracle returned a row that does not cut off the queried point (slack {slack:e})")]
    InvalidCut { slack: f64 },

    #[error("linear program is {0}")]
    LpStatus(&'static str),

    #[error("malformed LP: {0}")]
    MalformedLp(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
