use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: BigInt, m: BigInt },

    #[error("moduli are not pairwise coprime (gcd {gcd} found at modulus {modulus})")]
    NonCoprimeModuli { modulus: BigInt, gcd: BigInt },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what}: size {size} exceeds the limit {limit}")]
    ScaleGuard {
        what: String,
        size: BigInt,
        limit: BigInt,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("polyhedron is unbounded along the ray {ray:?}")]
    Unbounded { ray: Vec<BigInt> },

    #[error("hull is lower dimensional: affine dimension {affine_dim} in ambient dimension {dim}")]
    Degenerate { dim: usize, affine_dim: usize },

    #[error("polyhedron is empty")]
    Empty,

    #[error("no value assigned to variable {0}")]
    MissingVariable(usize),

    #[error("sentence carries no encoding metadata")]
    MissingMetadata,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn scale(what: impl Into<String>, size: impl Into<BigInt>, limit: impl Into<BigInt>) -> Self {
        Error::ScaleGuard {
            what: what.into(),
            size: size.into(),
            limit: limit.into(),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
