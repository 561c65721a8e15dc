pub mod arith;
pub mod bounds;
pub mod cli;
pub mod dwork;
pub mod error;
pub mod ffcount;
pub mod geometry;
pub mod harness;
pub mod hasse;
pub mod lattice;
pub mod representations;
pub mod support;

pub use error::{Error, InputErrorKind, Result};
