use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("index {index:?} out of range for dims {dims:?}")]
    Index { index: Vec<usize>, dims: Vec<usize> },
    #[error("degenerate state: all amplitudes are zero")]
    DegenerateState,
    #[error("degenerate factor: factor {0} is the zero vector")]
    DegenerateFactor(usize),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("invalid party subset: {0}")]
    Subset(String),
    #[error("unsupported state: {0}")]
    UnsupportedState(String),
    #[error("invalid generator spec: {0}")]
    Spec(String),
    #[error("invalid split {split} for {parties} parties")]
    Split { split: usize, parties: usize },
    #[error("invalid density matrix: {0}")]
    DensityMatrix(String),
    #[error("invalid decomposition: {0}")]
    Decomposition(String),
    #[error("matrix is not an isometry (max deviation of V^dag V from identity {0:e})")]
    Isometry(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("expected {expected} parties, got {got}")]
    Arity { expected: String, got: usize },
    #[error("too many generators to materialize for {0} amplitudes")]
    TooLarge(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
