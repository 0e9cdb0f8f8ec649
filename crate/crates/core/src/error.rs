use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid letter {letter} for rank {rank}")]
    InvalidLetter { letter: i64, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("expected a nontrivial word")]
    TrivialWord,
    #[error("matrix ({a},{b},{c},{d}) has determinant {det} mod {p}, expected 1")]
    NotUnimodular {
        p: u64,
        a: u64,
        b: u64,
        c: u64,
        d: u64,
        det: u64,
    },
    #[error("budget exceeded: {what} needs {needed}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("no non-law witness found for {word} in PSL2({p})")]
    WitnessNotFound { word: String, p: u64 },
    #[error("conjugator search exhausted radius {radius} combining {left} and {right}")]
    CombineFailed {
        radius: usize,
        left: String,
        right: String,
    },
    #[error("length bound violated: achieved {achieved}, bound {bound} ({what})")]
    BoundViolated {
        what: &'static str,
        achieved: u128,
        bound: u128,
    },
    #[error("schedule unfit at m = {m}: {reason}")]
    ScheduleUnfit { m: usize, reason: String },
    #[error("function is not surjective onto its range: value {0} has no preimage")]
    NotSurjective(u128),
    #[error("table too short: need index {needed}, have {have}")]
    InsufficientTable { needed: u128, have: usize },
    #[error("word {word} is not in W_{level} (needs length < {limit_num}/3)")]
    NotInW {
        word: String,
        level: usize,
        limit_num: u64,
    },
    #[error("schedule prefix exceeded: {0}")]
    PrefixExceeded(String),
    #[error("certificate failed: {0}")]
    CertificateFailed(String),
    #[error("hypothesis failed at n = {n}: {reason}")]
    HypothesisFailed { n: u128, reason: String },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Stable snake_case name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidLetter { .. } => "invalid_letter",
            Error::RankMismatch { .. } => "rank_mismatch",
            Error::NotPrime(_) => "not_prime",
            Error::TrivialWord => "trivial_word",
            Error::NotUnimodular { .. } => "not_unimodular",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::WitnessNotFound { .. } => "witness_not_found",
            Error::CombineFailed { .. } => "combine_failed",
            Error::BoundViolated { .. } => "bound_violated",
            Error::ScheduleUnfit { .. } => "schedule_unfit",
            Error::NotSurjective(_) => "not_surjective",
            Error::InsufficientTable { .. } => "insufficient_table",
            Error::NotInW { .. } => "not_in_w",
            Error::PrefixExceeded(_) => "prefix_exceeded",
            Error::CertificateFailed(_) => "certificate_failed",
            Error::HypothesisFailed { .. } => "hypothesis_failed",
            Error::Overflow(_) => "overflow",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
