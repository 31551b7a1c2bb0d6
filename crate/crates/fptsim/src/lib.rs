//! Exact sampling of the first-passage triplet (τ, Z_{τ−}, Z_τ) of a driftless
//! subordinator Z = Y + Q across a non-increasing boundary, where Y is an
//! r-truncated tempered stable process and Q is compound Poisson.

pub mod cli;
pub mod engine;
pub mod error;
pub mod fpde;
pub mod model;
pub mod numerics;
pub mod passage;
pub mod rng;
pub mod stable;
pub mod validation;

pub use error::{Error, Result};
pub use rng::RngStream;
