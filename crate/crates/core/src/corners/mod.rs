//! Manifolds with corners: face posets, CW realizations, Laurent spaces and
//! families over a base with monodromy.
mod cw;
mod family;
mod laurent;
mod local_system;
mod poset;

pub use cw::{circle, cohomology, relative_cohomology, torus, CellDegreeJson, CwComplex, CwJson};
pub use family::{family_cohomology, FamilyJson, FamilyTable};
pub use laurent::{laurent_space, LaurentCell, LaurentSpace};
pub use local_system::{
    dense, local_system_cohomology, BaseJson, BaseSpace, LocalSystem, LocalSystemJson, Word,
};
pub use poset::{Face, FacePoset, PosetJson};
