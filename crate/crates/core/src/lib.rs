//! Exact computation of the weight spectral sequences and mixed Hodge
//! numbers attached to a normal crossing configuration.

pub mod atlas;
pub mod linalg;
pub mod complexes;
pub mod mhs;
pub mod report;
pub mod pairings;
pub mod logforms;
pub mod suites;
pub mod cli;
