use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element of dimension {got} does not belong to algebra `{algebra}` (dim {expected})")]
    ParentMismatch {
        algebra: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("algebra is not semisimple: {0}")]
    NotSemisimple(String),
    #[error("star structure does not give a positive inner product (min Gram eigenvalue {0:e})")]
    InvalidStar(f64),
    #[error("span is not a Hopf subalgebra: {0}")]
    NotHopfSubalgebra(String),
    #[error("no separability idempotent: {0}")]
    NotSeparable(String),
    #[error("comodule algebra has no augmentation")]
    NotAugmented,
    #[error("degenerate quotient: {0}")]
    Degenerate(String),
    #[error("lattice validation failed: {0}")]
    Lattice(String),
    #[error("unsupported local configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("dimension {dim} exceeds the dense budget {budget}")]
    TooLarge { dim: usize, budget: usize },
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),
    #[error("unknown reference `{0}`")]
    UnknownRef(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
