use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by an identically zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("pole at sample point: denominator `{0}` vanishes")]
    Pole(String),

    #[error("variable `{var}` is out of range for a system of dimension {m}")]
    IndexOutOfRange { var: String, m: usize },

    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{line}:{column}: unknown variable `{name}`")]
    UnknownVariable { line: usize, column: usize, name: String },

    #[error("{line}:{column}: exponent must be an integer constant")]
    NonIntegerExponent { line: usize, column: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("singular change of variables: {0}")]
    SingularChange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("system dimension {0} is outside the supported range 2..={max}", max = crate::expr::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
