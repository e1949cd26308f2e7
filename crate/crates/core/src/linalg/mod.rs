//! Exact rational arithmetic and sparse linear algebra.

pub mod echelon;
pub mod elimination;
pub mod rational;
pub mod sparse;

pub use echelon::{null_space_of_rows, EchelonBasis, Reduction};
pub use elimination::{
    homology, image_basis, induced_matrix, kernel_basis, quotient_dimension, quotient_of_spans,
    rank, solve, Quotient,
};
pub use rational::{ParseRationalError, Rational};
pub use sparse::{MatrixJson, SparseMatrix, SparseVec};
