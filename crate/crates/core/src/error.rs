use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol {symbol} is not in the {size}-PAM constellation")]
    InvalidSymbol { symbol: i64, size: usize },

    #[error("index {index} out of range (code size {size})")]
    IndexOutOfRange { index: String, size: String },

    #[error("invalid codeword: {0}")]
    InvalidCodeword(String),

    #[error("energy {energy} is on the boundary [{min}, {max}]; the Boltzmann fit degenerates")]
    DegenerateDistribution { energy: u64, min: u64, max: u64 },

    #[error("no codewords of length {n} with energy {energy} over {size}-PAM")]
    EmptyCode { n: usize, energy: u64, size: usize },

    #[error("exhaustive demapping needs {needed} orbit evaluations, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    #[error("assignment rule is not monotone for sorted solving: {0}")]
    NonMonotoneRule(String),

    #[error("alist parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("parity-check matrix has rank {rank} < {rows} rows; cannot set up systematic encoding")]
    RankDeficient { rank: usize, rows: usize },

    #[error("frame layout does not tile: {0}")]
    FrameLayout(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
