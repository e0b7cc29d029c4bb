use thiserror::Error;

use crate::prefix_words::Word;

/// Errors raised by element construction and the group operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid word {0:?}: only '0', '1' and '^' (empty word) are allowed")]
    InvalidWord(String),

    #[error("words {0} and {1} are prefix-comparable, not an antichain")]
    InvalidAntichain(Word, Word),

    #[error("antichain does not cover Cantor space (Kraft sum is not 1)")]
    IncompleteCover,

    #[error("input antichain is not complete")]
    IncompleteInput,

    #[error("word {0} occurs twice; the table is not a bijection")]
    NotBijection(Word),

    #[error("word {0} is not a member of the antichain")]
    NotAMember(Word),

    #[error("element is undefined on vertex {0} (strictly above the domain antichain)")]
    UndefinedOnVertex(Word),

    #[error("malformed decomposition: {0}")]
    MalformedDecomposition(String),

    #[error("depth {depth} is below the cutoff level {cutoff}")]
    InvalidDepth { depth: usize, cutoff: usize },

    #[error("iteration bound {0} exceeded")]
    BoundExceeded(usize),

    #[error("element is torsion of order {0}")]
    IsTorsion(u64),

    #[error("element has finite orbits of lengths {0:?}")]
    HasNontrivialFiniteOrbits(Vec<u64>),

    #[error("order must be at least 1, got {0}")]
    InvalidOrder(i64),

    #[error("sign must be -1 or +1, got {0}")]
    InvalidSign(i64),

    #[error("invariant falsified: {0}")]
    Falsified(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
