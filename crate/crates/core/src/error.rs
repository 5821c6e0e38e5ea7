use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the solver can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid precision: {bits} bits (minimum is {min})")]
    InvalidPrecision { bits: u32, min: u32 },

    #[error("malformed decimal literal {input:?} at offset {offset}: {reason}")]
    Parse {
        input: String,
        offset: usize,
        reason: &'static str,
    },

    #[error("precision mismatch: context has {expected} bits, value has {found}")]
    PrecisionMismatch { expected: u32, found: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("conditioning error: {0}")]
    Conditioning(String),

    #[error("evaluation point lies within {guard:e} of a lattice pole")]
    Pole { guard: f64 },

    #[error("index {index} out of range for {len} basis functions")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point lies inside a hole, not in the domain")]
    PointOutsideDomain,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("numerically rank deficient: column {column} is dependent (rank {rank} of {cols}); try a smaller k_max")]
    RankDeficient {
        column: usize,
        rank: usize,
        cols: usize,
    },

    #[error("matrix is not numerically positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("pencil reduction failed: kernel block is numerically singular")]
    IndefiniteReduction,

    #[error("degenerate pencil: right-hand matrix has rank zero")]
    DegeneratePencil,

    #[error("degenerate eigenfunction candidate: {0}")]
    DegenerateCandidate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end:
    /// 2 for validation failures, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidPrecision { .. }
            | Error::Parse { .. }
            | Error::PrecisionMismatch { .. }
            | Error::Domain(_)
            | Error::Geometry(_)
            | Error::Conditioning(_)
            | Error::Config(_)
            | Error::Json(_) => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}
