//! Hochschild and cyclic homology of finite-dimensional superalgebras.

pub mod algebra;
pub mod chains;
pub mod cyclic;
pub mod filtered;

pub use algebra::{
    associated_graded, AlgebraJson, FilteredAlgebraJson, FilteredSuperAlgebra, GradedAlgebra,
    SuperAlgebra,
};
pub use chains::HochschildChains;
pub use cyclic::{
    hc, hh, hh_of, hunital_check, sbi_check, supertrace_space, CyclicBicomplex, HUnitalReport,
    HcReport, SbiReport, SbiRow, SupertraceSpace, TopDegree, TruncatedDims,
};
pub use filtered::{compare_e1_with_gr, hochschild_filtration, E1Comparison, E1Entry};
