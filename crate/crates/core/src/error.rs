use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid character at position {0}")]
    InvalidCharacter(usize),
    #[error("image is not a permitted base-21 word")]
    ForbiddenImage,
    #[error("image length {found}, expected {expected}")]
    BadLength { expected: usize, found: usize },
    #[error("value {0} is not a member of the residue system")]
    ValueNotInSystem(u32),
    #[error("modulus {0} is not a prime")]
    NotPrime(u32),
    #[error("representative list is malformed")]
    BadRepresentatives,
    #[error("LFSR register is all-zero")]
    ZeroState,
    #[error("generator state is degenerate (all stages at identity)")]
    DegenerateState,
    #[error("no period found within {0} steps")]
    NotFound(u64),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: u64, limit: u64 },
    #[error("code has no valid words")]
    EmptyCode,
    #[error("run limits are invalid: {0}")]
    BadLimits(String),
    #[error("enumeration budget exceeded")]
    BudgetExceeded,
    #[error("invalid image{}", .word.map(|m| format!(" at word {m}")).unwrap_or_default())]
    InvalidImage { word: Option<usize> },
    #[error("stream length {len} is not a multiple of word length {word_len}")]
    PartialWord { len: usize, word_len: usize },
    #[error("target map rows do not sum to the same total")]
    MalformedTarget,
    #[error("maternal index {0} is rejected")]
    RejectedIndex(u64),
    #[error("map recovery failed: {0}")]
    Inconsistent(String),
    #[error("stream too short")]
    StreamTooShort,
    #[error("window length {0} not in {{2,3,5}}")]
    BadWindow(usize),
    #[error("all values are equal, no contrast")]
    Flat,
    #[error("word alignment failed")]
    AlignmentFailed,
    #[error("scrambler synchronization failed")]
    SyncFailed,
    #[error("desynchronization detected at word {0}")]
    DesyncDetected(usize),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
