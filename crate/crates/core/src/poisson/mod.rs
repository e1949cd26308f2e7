//! Laurent-monomial differential forms on a cotangent patch, the Brylinski
//! differential, the vertical symplectic star and windowed homology.
mod form;
mod homology;
mod identities;
mod ops;
mod star;

pub use form::{wedge_sign, Bivector, Form, Monomial, Patch, PatchJson, TermJson};
pub use homology::{
    homogeneous_derham, poisson_homology, star_identities_on_window, verify_theorem_delta, DerhamTable,
    HomologyOp, PoissonHomology, TheoremReport,
};
pub use identities::{check_base_bilinearity, check_explicit_formula, check_identities, IdentityCheck, IdentityReport};
pub use ops::{
    alpha_op, bidegree, bracket, contract, d_full, d_hor, d_in, d_vert, delta, delta_explicit, delta_vert,
    expand_factored, homogeneity, interior, liouville_form, radial_contract, symplectic_form, volume_form,
};
pub use star::Star;
