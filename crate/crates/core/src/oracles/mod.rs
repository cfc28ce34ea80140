//! Reference solutions: Grassmannian coordinates, the `n₊ = 1` vector case and
//! the reduced 4-dimensional Riccati system.

mod four_dim;
mod grassmann;
mod vector_case;

pub use four_dim::{
    four_dim_evolve, four_dim_invariants, four_dim_quasi_period, four_dim_rhs, FourDimInvariants, FourDimState,
    Polynomial,
};
pub use grassmann::{
    display_fit, grassmann_embed, grassmann_from_z, grassmann_zz_invariance, orthonormal_basis, z_coordinate,
    z_display, GrassmannPoint, RANK_TOLERANCE,
};
pub use vector_case::{m_k, product_identity_residual, vector_case_solution, VectorCaseState};
