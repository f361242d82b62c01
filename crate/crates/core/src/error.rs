use crate::game::JointAction;
use crate::solvers::SearchStats;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// What a search had produced when its node budget ran out.
#[derive(Debug, Clone)]
pub struct PartialSearch {
    pub budget: u64,
    pub psne: Vec<JointAction>,
    pub count: u64,
    pub stats: SearchStats,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("player index {index} out of range for a game with {n} players")]
    PlayerOutOfRange { index: usize, n: usize },

    #[error("length mismatch: expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid action {0}: actions are -1 or +1")]
    InvalidAction(i64),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("player {0} is assigned more than once")]
    DuplicatePlayer(usize),

    #[error("exhaustive enumeration over {n} free players exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error(
        "search budget of {} nodes exhausted after {} equilibria",
        .0.budget,
        .0.count
    )]
    BudgetExhausted(Box<PartialSearch>),

    #[error("dynamics did not settle within {0} rounds")]
    RoundLimit(usize),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("method not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
