//! Scale-free-property-preserving network embedding.

pub mod bounds;
pub mod eigen;
pub mod embedding;
pub mod error;
pub mod generator;
pub mod graph;
pub mod pipeline;
pub mod powerlaw;
pub mod proximity;
pub mod reconstruct;
pub mod sparse;
pub mod spectral;
pub mod stats;
pub mod tasks;
pub mod walker;

pub use embedding::Embedding;
pub use error::{Error, Result};
pub use graph::Graph;
