use thiserror::Error;

/// Errors raised by ring construction, presentation building and homomorphism
/// certification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("carrier size {size} exceeds the configured cap {cap}")]
    CarrierTooLarge { size: u128, cap: usize },

    #[error("tensor presentation needs {generators} generators, bound is {bound}")]
    TensorTooLarge { generators: u128, bound: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("ring is not a dual-number ring")]
    NotDualRing,

    #[error("element is not a unit")]
    NotAUnit,

    #[error("2 is not invertible in the ring")]
    NoHalf,

    #[error("ring is not weakly {k}-fold stable")]
    NotStable { k: usize },

    #[error("word has length {got}, group has {expected} generators")]
    SizeMismatch { expected: usize, got: usize },

    #[error("relation {index} of the source is not mapped to zero")]
    RelationNotPreserved { index: usize },

    #[error("group has free rank {free_rank}")]
    InfiniteGroup { free_rank: usize },

    #[error("element is not in the image of the map")]
    NotInImage,
}

pub type Result<T> = std::result::Result<T, Error>;
