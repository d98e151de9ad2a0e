use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("inadmissible Cartan type {series}{rank}: {reason}")]
    InadmissibleType { series: char, rank: usize, reason: &'static str },

    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("Weyl group has order {order}, which exceeds the enumeration cap {cap}")]
    CapExceeded { order: u128, cap: u128 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("element is not in the lattice: {0}")]
    NotInLattice(String),

    #[error("invalid sublattice: {0}")]
    Sublattice(String),

    #[error("R-group is not abelian: {0}")]
    NonAbelian(String),

    #[error("invalid transfer datum: {0}")]
    Transfer(String),

    #[error("enumeration refused: {0}")]
    Blowup(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
