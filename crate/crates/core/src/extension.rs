//! The extension of `GL⁰_res` by `GL¹₊` through `Φ(A)(n) = A₊₊nA₊₊⁻¹` and
//! `Ω(A₁,A₂) = A₁₊₊A₂₊₊(A₁A₂)₊₊⁻¹`, its Lie algebra `L¹₊ ⊕ gl_res`, and the
//! adjoint and coadjoint actions.
//!
//! The formulas are local: every `++` block that gets inverted must be
//! invertible, which holds near the identity.

use crate::error::{Error, Result};
use crate::lie_poisson::AlgebraElement;
use crate::linalg;
use crate::polarized::{Block, BlockOperator};
use crate::{CMatrix, C64};

/// Element `(n, A)` of `GL¹₊ ×_{Φ,Ω} GL⁰_res` near the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGroupElement {
    pub n: CMatrix,
    pub a: BlockOperator,
}

/// Element `(ρ, X)` of `L¹₊ ⊕ gl_res`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedAlgebraElement {
    pub rho: CMatrix,
    pub x: BlockOperator,
}

/// Element `(τ, μ)` of the predual `L⁰₊ ⊕ L¹_res`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedCoalgebraElement {
    pub tau: CMatrix,
    pub mu: BlockOperator,
}

fn inv(m: &CMatrix) -> Result<CMatrix> {
    linalg::checked_inverse(m, linalg::DEFAULT_SINGULAR_THRESHOLD)
}

fn check_square(n: &CMatrix, size: usize) -> Result<()> {
    if n.shape() != (size, size) {
        return Err(Error::ShapeMismatch(format!("expected {size}×{size}, got {}×{}", n.nrows(), n.ncols())));
    }
    Ok(())
}

/// `Φ(A)(n) = A₊₊ n A₊₊⁻¹`.
pub fn phi_map(a: &BlockOperator, n: &CMatrix) -> Result<CMatrix> {
    check_square(n, a.dims().n_plus)?;
    let app = a.app();
    Ok(&app * n * inv(&app)?)
}

/// `Ω(A₁, A₂) = A₁₊₊ A₂₊₊ (A₁A₂)₊₊⁻¹`.
pub fn omega_map(a1: &BlockOperator, a2: &BlockOperator) -> Result<CMatrix> {
    let prod = a1.try_mul(a2)?;
    Ok(a1.app() * a2.app() * inv(&prod.app())?)
}

/// `φ(X)(ρ) = [X₊₊, ρ]`.
pub fn phi_derivative(x: &BlockOperator, rho: &CMatrix) -> CMatrix {
    let xpp = x.app();
    &xpp * rho - rho * &xpp
}

/// `ω(X, Y) = −X₊₋Y₋₊ + Y₊₋X₋₊`.
pub fn omega_derivative(x: &BlockOperator, y: &BlockOperator) -> CMatrix {
    y.apm() * x.amp() - x.apm() * y.amp()
}

/// `(n₁, A₁)·(n₂, A₂) = (n₁ Φ(A₁)(n₂) Ω(A₁, A₂), A₁A₂)`.
pub fn group_product(g1: &LocalGroupElement, g2: &LocalGroupElement) -> Result<LocalGroupElement> {
    let n = &g1.n * phi_map(&g1.a, &g2.n)? * omega_map(&g1.a, &g2.a)?;
    Ok(LocalGroupElement { n, a: g1.a.try_mul(&g2.a)? })
}

/// `[(ρ,X),(ρ',Y)] = ([ρ,ρ'] + [X₊₊,ρ'] − [Y₊₊,ρ] − X₊₋Y₋₊ + Y₊₋X₋₊, [X,Y])`.
pub fn extended_bracket(e1: &ExtendedAlgebraElement, e2: &ExtendedAlgebraElement) -> Result<ExtendedAlgebraElement> {
    let x = e1.x.try_commutator(&e2.x)?;
    let rho = &e1.rho * &e2.rho - &e2.rho * &e1.rho + phi_derivative(&e1.x, &e2.rho) - phi_derivative(&e2.x, &e1.rho)
        + omega_derivative(&e1.x, &e2.x);
    Ok(ExtendedAlgebraElement { rho, x })
}

fn conjugate(a: &BlockOperator, x: &BlockOperator) -> Result<(BlockOperator, BlockOperator)> {
    let a_inv = BlockOperator::from_matrix(a.dims(), linalg::checked_inverse(a.matrix(), linalg::DEFAULT_SINGULAR_THRESHOLD)?)?;
    Ok((&(a * x) * &a_inv, a_inv))
}

/// `Ad_{(n,A)}(ρ,X) = (nA₊₊(ρ + X₊₊)A₊₊⁻¹n⁻¹ − (AXA⁻¹)₊₊, AXA⁻¹)`.
pub fn extended_adjoint(g: &LocalGroupElement, e: &ExtendedAlgebraElement) -> Result<ExtendedAlgebraElement> {
    check_square(&g.n, g.a.dims().n_plus)?;
    check_square(&e.rho, g.a.dims().n_plus)?;
    let (axa, _) = conjugate(&g.a, &e.x)?;
    let na = &g.n * g.a.app();
    let rho = &na * (&e.rho + e.x.app()) * inv(&na)? - axa.app();
    Ok(ExtendedAlgebraElement { rho, x: axa })
}

/// `Ad*_{(n,A)}(τ,μ) = (σ, σ̂ − A⁻¹τ̂A + A⁻¹μA)` with `σ = A₊₊⁻¹n⁻¹τnA₊₊`, hats
/// placing an `n₊×n₊` matrix in the `++` block.
pub fn extended_coadjoint(g: &LocalGroupElement, m: &ExtendedCoalgebraElement) -> Result<ExtendedCoalgebraElement> {
    let dims = g.a.dims();
    check_square(&g.n, dims.n_plus)?;
    check_square(&m.tau, dims.n_plus)?;
    let na = &g.n * g.a.app();
    let sigma = inv(&na)? * &m.tau * &na;
    let a_inv = BlockOperator::from_matrix(dims, linalg::checked_inverse(g.a.matrix(), linalg::DEFAULT_SINGULAR_THRESHOLD)?)?;
    let embed = |t: &CMatrix| -> Result<BlockOperator> {
        let mut b = BlockOperator::zeros(dims);
        b.set_block(Block::PlusPlus, t)?;
        Ok(b)
    };
    let tau_moved = &(&a_inv * &embed(&m.tau)?) * &g.a;
    let mu_moved = &(&a_inv * &m.mu) * &g.a;
    let mu = &(&embed(&sigma)? - &tau_moved) + &mu_moved;
    Ok(ExtendedCoalgebraElement { tau: sigma, mu })
}

/// `⟨(τ,μ),(ρ,X)⟩ = Tr(τρ) + Tr_res(μX)`.
pub fn extended_pairing(m: &ExtendedCoalgebraElement, e: &ExtendedAlgebraElement) -> Result<C64> {
    check_square(&m.tau, e.rho.nrows())?;
    Ok((&m.tau * &e.rho).trace() + crate::polarized::pairing(&m.mu, &e.x)?)
}

/// Adjoint action of `C^× ×_{id,det∘Ω} GL⁰_res` on `C ⊕ L_res`:
/// `(λ + Tr((P₊ − A⁻¹P₊A)X), AXA⁻¹)`.
pub fn central_adjoint(a: &BlockOperator, e: &AlgebraElement) -> Result<AlgebraElement> {
    let (axa, a_inv) = conjugate(a, &e.x)?;
    let pp = BlockOperator::p_plus(a.dims());
    let shift = &pp - &(&(&a_inv * &pp) * a);
    Ok(AlgebraElement::new(e.lambda + (shift.matrix() * e.x.matrix()).trace(), axa))
}

/// Residuals of the four group-extension conditions at `(A₁, A₂, A₃, n)`:
/// `Φ(1) = id`, `Ω(1,A) = Ω(A,1) = 1`, the 2-cocycle identity and the
/// twisted-homomorphism identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CocycleResiduals {
    pub phi_identity: f64,
    pub omega_unit: f64,
    pub cocycle: f64,
    pub twisted_homomorphism: f64,
}

impl CocycleResiduals {
    pub fn max(&self) -> f64 {
        self.phi_identity.max(self.omega_unit).max(self.cocycle).max(self.twisted_homomorphism)
    }
}

pub fn cocycle_residuals(a1: &BlockOperator, a2: &BlockOperator, a3: &BlockOperator, n: &CMatrix) -> Result<CocycleResiduals> {
    let dims = a1.dims();
    let one = BlockOperator::identity(dims);
    let id_p = linalg::identity(dims.n_plus);
    let f = |m: CMatrix| linalg::frobenius_norm(&m);

    let phi_identity = f(phi_map(&one, n)? - n);
    let omega_unit = f(omega_map(&one, a1)? - &id_p).max(f(omega_map(a1, &one)? - &id_p));

    let a12 = a1.try_mul(a2)?;
    let a23 = a2.try_mul(a3)?;
    let lhs = omega_map(a1, a2)? * omega_map(&a12, a3)?;
    let rhs = phi_map(a1, &omega_map(a2, a3)?)? * omega_map(a1, &a23)?;
    let cocycle = f(lhs - rhs);

    let lhs = omega_map(a1, a2)? * phi_map(&a12, n)?;
    let rhs = phi_map(a1, &phi_map(a2, n)?)? * omega_map(a1, a2)?;
    let twisted_homomorphism = f(lhs - rhs);

    Ok(CocycleResiduals { phi_identity, omega_unit, cocycle, twisted_homomorphism })
}

/// Step for the mixed second derivatives below.
pub const MIXED_FD_STEP: f64 = 1e-4;

fn expm_op(x: &BlockOperator, t: f64) -> Result<BlockOperator> {
    BlockOperator::from_matrix(x.dims(), linalg::expm(x.scale_re(t).matrix())?)
}

/// Central mixed difference of `(s,t) ↦ Φ(exp(sX))(exp(tρ))` at the origin.
pub fn phi_mixed_derivative_fd(x: &BlockOperator, rho: &CMatrix, h: f64) -> Result<CMatrix> {
    let f = |s: f64, t: f64| -> Result<CMatrix> { phi_map(&expm_op(x, s)?, &linalg::expm(&(rho * C64::new(t, 0.0)))?) };
    Ok((f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / C64::new(4.0 * h * h, 0.0))
}

/// Antisymmetrised central mixed difference of
/// `(s,t) ↦ det Ω(exp(sX), exp(tY))` at the origin.
pub fn det_omega_mixed_derivative_fd(x: &BlockOperator, y: &BlockOperator, h: f64) -> Result<C64> {
    let mixed = |u: &BlockOperator, v: &BlockOperator| -> Result<C64> {
        let f = |s: f64, t: f64| -> Result<C64> { Ok(omega_map(&expm_op(u, s)?, &expm_op(v, t)?)?.determinant()) };
        Ok((f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h))
    };
    Ok(mixed(x, y)? - mixed(y, x)?)
}

/// Central difference of `t ↦ Ad_{(exp(tρ'), exp(tY))}(e)` at `t = 0`.
pub fn adjoint_derivative_fd(
    direction: &ExtendedAlgebraElement,
    e: &ExtendedAlgebraElement,
    h: f64,
) -> Result<ExtendedAlgebraElement> {
    let g = |t: f64| -> Result<LocalGroupElement> {
        Ok(LocalGroupElement { n: linalg::expm(&(&direction.rho * C64::new(t, 0.0)))?, a: expm_op(&direction.x, t)? })
    };
    let plus = extended_adjoint(&g(h)?, e)?;
    let minus = extended_adjoint(&g(-h)?, e)?;
    let c = C64::new(1.0 / (2.0 * h), 0.0);
    Ok(ExtendedAlgebraElement { rho: (plus.rho - minus.rho) * c, x: (&plus.x - &minus.x).scale(c) })
}

/// Residual of the cyclic condition
/// `Σ_cyc (ω([η,η'],η'') − φ(η)ω(η',η''))` for the pair `(φ, ω)`.
pub fn omega_condition_residual(x: &BlockOperator, y: &BlockOperator, z: &BlockOperator) -> Result<f64> {
    let term = |a: &BlockOperator, b: &BlockOperator, c: &BlockOperator| -> Result<CMatrix> {
        Ok(omega_derivative(&a.try_commutator(b)?, c) - phi_derivative(a, &omega_derivative(b, c)))
    };
    Ok(linalg::frobenius_norm(&(term(x, y, z)? + term(y, z, x)? + term(z, x, y)?)))
}

/// Residual of `ad_{ω(η,η')} + φ([η,η']) − [φ(η), φ(η')]` applied to `ρ`.
pub fn phi_condition_residual(x: &BlockOperator, y: &BlockOperator, rho: &CMatrix) -> Result<f64> {
    let w = omega_derivative(x, y);
    let ad = &w * rho - rho * &w;
    let lhs = ad + phi_derivative(&x.try_commutator(y)?, rho);
    let comm = phi_derivative(x, &phi_derivative(y, rho)) - phi_derivative(y, &phi_derivative(x, rho));
    Ok(linalg::frobenius_norm(&(lhs - comm)))
}
