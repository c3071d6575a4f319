//! Cycle polynomials of free-by-cyclic groups.
//!
//! The pipeline goes train-track map -> folded mapping torus -> dual digraph
//! -> cycle polynomial, and from there to McMullen and DKL cones and to the
//! first-return maps of other fibrations.

pub mod branched;
pub mod cli;
pub mod cones;
pub mod digraph;
pub mod error;
pub mod grpring;
pub mod intlin;
pub mod traintrack;

pub use error::{Error, Result};
