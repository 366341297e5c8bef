//! Exact arithmetic over Q(i): scalars, polynomials, rational functions,
//! normal jets and univariate helpers.

pub mod gaussian;
pub mod jet;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod upoly;

pub use gaussian::{q, GaussianRational, Q};
pub use jet::{ideal_order, jet_invert, jet_mul, jet_project, NormalJet};
pub use poly::{Monomial, Polynomial};
pub use rational::RationalFunction;
pub use upoly::UPoly;

use crate::error::Result;

pub fn differentiate(p: &RationalFunction, var: &str, scope: &[String]) -> Result<RationalFunction> {
    p.differentiate(var, scope)
}

pub fn substitute(
    p: &RationalFunction,
    assignment: &std::collections::BTreeMap<String, RationalFunction>,
) -> Result<RationalFunction> {
    p.substitute(assignment)
}
