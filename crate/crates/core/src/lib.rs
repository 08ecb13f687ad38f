//! Linear codes from subspace designs.
//!
//! The crate builds binary codes from (subspace) designs over finite
//! geometries, computes their p-ranks both from incidence matrices and in
//! closed form, and implements one-step and two-step majority-logic
//! decoding together with tools to measure their decoding radius.

pub mod cli;
pub mod codes;
pub mod decoders;
pub mod designs;
pub mod error;
pub mod field;
pub mod geometry;
pub mod io;
pub mod matrix;
pub mod table;

pub use error::{Error, Result};
