use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("permutation {0} does not commute with the reversal k -> b-1-k")]
    NotReversalSymmetric(String),
    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: usize, base: usize },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("word must be a non-empty string over {{s, c}}, got {0:?}")]
    InvalidWord(String),
    #[error("{points} points exceed the size cap of {cap}")]
    SizeCapExceeded { points: u128, cap: u64 },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error(
        "search over {total} permutations exceeds the budget of {budget} \
         (scanned 0; rerun with a larger budget)"
    )]
    BudgetExceeded { total: u128, budget: u128 },
    #[error(
        "full search at base {base} scans {total} permutations; \
         pass allow_long to run it (estimated {estimate_secs}s)"
    )]
    LongRunNotAllowed { base: usize, total: u128, estimate_secs: u64 },
}
