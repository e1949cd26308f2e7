//! Chain complexes, pairs and filtered complexes.

pub mod chain;
pub mod filtered;
pub mod pair;

pub use chain::{dual_complex, tensor_product, ChainComplex, ComplexJson, DegreeJson, DifferentialJson, GradedSpace, HomologyGroup};
pub use filtered::{ChainMap, FilteredComplex, FilteredComplexJson};
pub use pair::{exact_at, ComplexPair, LesRow, LongExactSequence};
