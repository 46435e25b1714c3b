use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QecError {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("operation requires odd prime modulus, got {0}")]
    RequiresOddPrime(u64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("graph adjacency not materialized (oracle-only)")]
    NotMaterialized,

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("no compatible (u,v,w) triple for this pattern")]
    NoCompatibleTriple,

    #[error("no witness found after {attempts} (u,v,w) triples")]
    NoWitness { attempts: usize },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("extension by i not a field for p = {0} (requires p = 3 mod 4)")]
    NotAField(u64),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, QecError>;
