//! Expression and manifest front-end.

pub mod expr;
pub mod manifest;

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::RationalFunction;
use crate::error::{Error, Result};

pub use manifest::{parse_manifest, DegreeExpectation, ModelBundle, ObjectDecl, PointDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    pub fn error(line: usize, column: usize, message: String) -> Self {
        Diagnostic { line, column, message, severity: Severity::Error }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, sev, self.message)
    }
}

/// Parse `text` over the variables `vars`.
pub fn parse_expression(text: &str, vars: &[String]) -> Result<RationalFunction> {
    expr::parse_scalar_at(text, vars, &BTreeMap::new(), 1, 1).map_err(|d| Error::Parse(vec![d]))
}

/// Inverse of [`parse_expression`].
pub fn serialize_expression(r: &RationalFunction) -> String {
    r.to_expr_string()
}
