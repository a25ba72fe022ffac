use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a supported prime")]
    NotAPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("modulus p^k does not fit the working integer type (p = {p}, k = {k})")]
    ModulusOverflow { p: u64, k: u32 },
    #[error("operands live in different rings: Z/{p_lhs}^{k_lhs} vs Z/{p_rhs}^{k_rhs}")]
    RingMismatch {
        p_lhs: u64,
        k_lhs: u32,
        p_rhs: u64,
        k_rhs: u32,
    },
    #[error("{value} is not a unit mod {p}^{k}")]
    NotAUnit { value: u64, p: u64, k: u32 },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("not a Lie algebra at this precision: Jacobi defect at triple ({0}, {1}, {2})")]
    InvalidLie(usize, usize, usize),
    #[error("bracket table is not powerful: entry ({i}, {j}) -> x_{n} has valuation {val} < {needed}")]
    NotPowerful {
        i: usize,
        j: usize,
        n: usize,
        val: u32,
        needed: u32,
    },
    #[error("limit formula did not stabilize: {0}")]
    NonConvergence(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("cutoff exceeded: requested degree {requested} beyond stored degree {cutoff}")]
    CutoffExceeded { requested: usize, cutoff: usize },
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("operation requires p = 2, got p = {0}")]
    WrongPrime(u64),
    #[error("size guard: p^k = {0} exceeds the dense-computation limit {1}")]
    SizeGuard(u64, u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("basis change is not unimodular mod p^k")]
    NotUnimodular,
}

pub type Result<T> = std::result::Result<T, Error>;
