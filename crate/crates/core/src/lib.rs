//! Spectral upper bounds on Independent Cascade influence, with Monte Carlo
//! and exact validation tools.

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod netgen;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Edge, HazardMatrix, InfluencerSet, ProbGraph, SparseMatrix};
