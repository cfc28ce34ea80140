//! Hamiltonian hierarchies on finite truncations of the Banach Lie-Poisson
//! spaces `C ⊕ L¹_res` and `iR ⊕ UL¹_res` attached to the restricted
//! Grassmannian.
//!
//! The polarization `H = H₊ ⊕ H₋` is truncated to `n₊ + n₋` dimensions; every
//! operator is stored as a dense complex matrix with a fixed 2×2 block
//! structure. On top of that the crate provides
//!
//! * [`polarized`]: block arithmetic, restricted trace, the `‖·‖_*` and
//!   `‖·‖_res` norms and the trace pairing;
//! * [`lie_poisson`]: the Schwinger cocycle, the centrally extended bracket,
//!   coadjoint actions and the Poisson pencil;
//! * [`hierarchy`]: the `W`/`H` polynomials, the integer coefficients linking
//!   them, Casimirs, Hamiltonians in involution, their gradients and flows, and
//!   the generating Hamiltonian;
//! * [`integrators`]: RK4 and an isospectral Lie-Euler stepper with drift
//!   monitoring;
//! * [`oracles`]: Grassmannian coordinates, the `n₊ = 1` vector case and the
//!   reduced 4-dimensional Riccati system;
//! * [`extension`]: the group/algebra extension data `Φ`, `Ω`, `φ`, `ω` and
//!   the adjoint and coadjoint actions built from them.

pub mod error;
pub mod extension;
pub mod hierarchy;
pub mod integrators;
pub mod lie_poisson;
pub mod linalg;
pub mod oracles;
pub mod polarized;
pub mod random;

pub use error::{Error, Result};
pub use hierarchy::{FlowForm, HamiltonianId};
pub use lie_poisson::{AlgebraElement, Gradient, GradientProvider};
pub use polarized::{BlockOperator, Dims, ExtendedPoint};

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

#[cfg(test)]
pub(crate) fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
