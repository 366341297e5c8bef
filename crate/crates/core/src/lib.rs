//! Exact residues of holomorphic foliations and self-maps along a
//! submanifold, for models given as chart atlases.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod atlas;
pub mod connections;
pub mod error;
pub mod foliation;
pub mod harness;
pub mod indices;
pub mod maps;
pub mod parser;
pub mod residue;

pub use error::{Error, Result};
