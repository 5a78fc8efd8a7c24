use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(usize),

    #[error("invalid fragment: {0}")]
    InvalidFragment(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("no section cover: {0}")]
    NoCover(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("unknown tile kind `{0}`")]
    UnknownTile(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("site {site} is not a neighbour of {center}")]
    NotNeighbour { center: usize, site: usize },

    #[error("unsupported lattice for this bound: {0}")]
    UnsupportedLattice(String),

    #[error("lattice is not regular: {0}")]
    NotRegular(String),

    #[error("no Trotter error bound is available for {0}")]
    UnsupportedBound(String),

    #[error("expected {expected} sections, got {got}")]
    SectionCount { expected: usize, got: usize },

    #[error("{n} is not divisible by the phasing group size {m}")]
    Divisibility { n: usize, m: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator on {0} qubits exceeds the dense limit")]
    SizeLimit(usize),

    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
