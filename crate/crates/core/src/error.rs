use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: pair ({i}, {j}) declared twice")]
    DuplicatePair { line: usize, i: usize, j: usize },

    #[error("line {line}: index {index} out of range for rank {rank}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        rank: usize,
    },

    #[error("line {line}: not odd-angled: m({i},{j}) = {value} must be odd and at least 3")]
    NotOddAngled {
        line: usize,
        i: usize,
        j: usize,
        value: u64,
    },

    #[error("line {line}: order {value} exceeds the supported maximum {max}")]
    OrderTooLarge { line: usize, value: u64, max: u32 },

    #[error("rank {0} is not supported (must be between 1 and 64)")]
    UnsupportedRank(usize),

    #[error("generator {generator} out of range for rank {rank}")]
    GeneratorOutOfRange { generator: usize, rank: usize },

    #[error("word length cap of {cap} letters exceeded; raise the cap explicitly")]
    LengthCap { cap: usize },

    #[error("the residue of pair ({i}, {j}) is infinite")]
    InfiniteResidue { i: usize, j: usize },

    #[error("radius {given} too small: at least {required} is required")]
    RadiusTooSmall { required: usize, given: usize },

    #[error("{what}: budget of {budget} exceeded")]
    BudgetExceeded { what: &'static str, budget: usize },

    #[error("expected a rank-{expected} system, got rank {actual}")]
    RankMismatch { expected: usize, actual: usize },

    #[error("construction hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("internal verification failure: {0}")]
    Verification(String),

    #[error("{0}")]
    Invalid(String),
}
