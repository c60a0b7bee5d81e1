use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable tables differ")]
    VarTableMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("too many variables ({0})")]
    TooManyVariables(usize),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("relation has zero coefficient on the eliminated parameter")]
    ZeroRelationCoefficient,
    #[error("degree mismatch for {system}: expected {expected}, found {actual}")]
    DegreeMismatch {
        system: String,
        expected: u32,
        actual: u32,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing fixture {0}")]
    MissingFile(PathBuf),
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("unknown map `{0}`")]
    UnknownMap(String),
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("unsupported ansatz: {0}")]
    UnsupportedAnsatz(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parameter count mismatch: {0} vs {1}")]
    AlphaCountMismatch(usize, usize),
    #[error("inconsistent adjacency between nodes {0} and {1}")]
    InconsistentAdjacency(usize, usize),
    #[error("generator {0} is not an involution")]
    NotInvolution(String),
    #[error("generator {0} does not negate its own root")]
    NotReflection(String),
    #[error("parameter action of {0} is not a permutation")]
    NotAPermutation(String),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("curve {name} has self-intersection {square}, blow-down needs -1")]
    NotContractible { name: String, square: i64 },
    #[error("maximum step count {0} exceeded")]
    MaxSteps(usize),
    #[error("trajectory escaped every chart at t = {0}")]
    Escape(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}
