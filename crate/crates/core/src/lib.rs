//! Exact rational homological algebra on desk-scale models.

pub mod acceptance;
pub mod complexes;
pub mod corners;
pub mod error;
pub mod hochschild;
pub mod linalg;
pub mod par;
pub mod poisson;
pub mod report;
pub mod spectral;
pub mod symbols;
pub mod tables;

pub use error::{Error, Result};
pub use linalg::{Rational, SparseMatrix};
