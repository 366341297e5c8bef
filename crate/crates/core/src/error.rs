use crate::parser::Diagnostic;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("pole everywhere: composed denominator is identically zero")]
    PoleEverywhere,
    #[error("division by zero")]
    DivisionByZero,
    #[error("not regular along S: {0}")]
    NotRegular(String),
    #[error("not a unit along S")]
    NotUnit,
    #[error("{} parse error(s); first: {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Parse(Vec<Diagnostic>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Geometry(String),
    #[error("residue: {0}")]
    Residue(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
