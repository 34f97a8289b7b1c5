//! Bond percolation laboratory: cluster exploration on finite exhaustions with a
//! boundary halo, exact enumeration oracles, cluster anatomy and asymptotic
//! diagnostics for sharpness of the volume tail on nonamenable graphs.

pub mod anatomy;
pub mod asymptotics;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod graph;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Family, Graph};
