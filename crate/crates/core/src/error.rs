use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Every phase of a two-phase subprotocol rejected; impossible when one
    /// prover is honest.
    #[error("no honest prover detected in {0}")]
    NoHonestProver(&'static str),

    #[error("domain of dimension {dim} exceeds the enumeration cap {cap}")]
    EnumerationCap { dim: u8, cap: u8 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A value the construction guarantees was violated.
    #[error("construction violated: {0}")]
    Construction(String),

    #[error("bucket {bucket}: {source}")]
    Bucket { bucket: usize, source: Box<Error> },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Error {
        Error::InvalidParam(msg.into())
    }

    pub fn construction(msg: impl Into<String>) -> Error {
        Error::Construction(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Error {
        Error::Parse { line, msg: msg.into() }
    }

    /// Parse faults come from input files; everything else is a protocol fault.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Error {
        Error::Io(e.to_string())
    }
}
