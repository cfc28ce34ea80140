//! The central extension `C ⊕ L_res` of `gl_res` by the Schwinger cocycle, its
//! coadjoint actions on the predual `C ⊕ L¹_res`, and the Poisson pencil.
//!
//! Sign conventions: the predual pairing is `⟨(γ,μ),(λ,X)⟩ = γλ + Tr_res(μX)`
//! and `ad*` is the transpose of `ad` under it, so that
//! `⟨ad*_a p, b⟩ = ⟨p, [a, b]⟩`.

use crate::error::{Error, Result};
use crate::linalg;
use crate::polarized::{pairing, Block, BlockOperator, ExtendedPoint};
use crate::C64;

/// Element `(λ, X)` of the centrally extended Lie algebra `C ⊕ L_res`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub lambda: C64,
    pub x: BlockOperator,
}

impl AlgebraElement {
    pub fn new(lambda: C64, x: BlockOperator) -> Self {
        Self { lambda, x }
    }
}

/// Schwinger term `s(X, Y) = Tr(X₊₋Y₋₊ − Y₊₋X₋₊)`.
pub fn schwinger(x: &BlockOperator, y: &BlockOperator) -> Result<C64> {
    if x.dims() != y.dims() {
        return Err(Error::DimensionMismatch { expected: x.dims(), found: y.dims() });
    }
    let a = (x.apm() * y.amp()).trace();
    let b = (y.apm() * x.amp()).trace();
    Ok(a - b)
}

/// `[(λ,X),(λ',Y)] = (−s(X,Y), [X,Y])`.
pub fn central_bracket(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    let s = schwinger(&a.x, &b.x)?;
    Ok(AlgebraElement::new(-s, a.x.try_commutator(&b.x)?))
}

/// The pairing `γλ + Tr_res(μX)`.
pub fn extended_pairing(p: &ExtendedPoint, a: &AlgebraElement) -> Result<C64> {
    Ok(p.gamma * a.lambda + pairing(&p.mu, &a.x)?)
}

/// `X₊₋ − X₋₊` with both blocks left in place.
fn off_diagonal_difference(x: &BlockOperator) -> BlockOperator {
    &x.restrict_to(Block::PlusMinus) - &x.restrict_to(Block::MinusPlus)
}

/// `ad*_{(λ,X)}(γ,μ) = (0, −[X,μ] − γ(X₊₋ − X₋₊))`.
pub fn coad_action(a: &AlgebraElement, p: &ExtendedPoint) -> Result<ExtendedPoint> {
    let comm = a.x.try_commutator(&p.mu)?;
    let shift = off_diagonal_difference(&a.x).scale(p.gamma);
    Ok(ExtendedPoint::new(C64::default(), &(-&comm) - &shift))
}

/// Group coadjoint action `(γ, A⁻¹μA + γ(P₊ − A⁻¹P₊A))`.
pub fn group_coad(a: &BlockOperator, p: &ExtendedPoint) -> Result<ExtendedPoint> {
    group_coad_with_threshold(a, p, linalg::DEFAULT_SINGULAR_THRESHOLD)
}

/// As [`group_coad`], rejecting `A` whose inverse condition number is below
/// `threshold`.
pub fn group_coad_with_threshold(a: &BlockOperator, p: &ExtendedPoint, threshold: f64) -> Result<ExtendedPoint> {
    if a.dims() != p.dims() {
        return Err(Error::DimensionMismatch { expected: p.dims(), found: a.dims() });
    }
    let dims = a.dims();
    let inv = BlockOperator::from_matrix(dims, linalg::checked_inverse(a.matrix(), threshold)?)?;
    let conj = &(&inv * &p.mu) * a;
    let pp = BlockOperator::p_plus(dims);
    let moved = &(&inv * &pp) * a;
    let shift = (&pp - &moved).scale(p.gamma);
    Ok(ExtendedPoint::new(p.gamma, &conj + &shift))
}

/// Partial derivatives `(D₁F, D₂F)` of a function on `C ⊕ L¹_res`, with `D₂F`
/// identified with an element of `gl_res` through the trace pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub d_gamma: C64,
    pub d_mu: BlockOperator,
}

pub trait GradientProvider {
    fn gradient(&self, p: &ExtendedPoint) -> Result<Gradient>;
}

impl<F> GradientProvider for F
where
    F: Fn(&ExtendedPoint) -> Result<Gradient>,
{
    fn gradient(&self, p: &ExtendedPoint) -> Result<Gradient> {
        self(p)
    }
}

/// The coordinate function `(γ, μ) ↦ γ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GammaCoordinate;

impl GradientProvider for GammaCoordinate {
    fn gradient(&self, p: &ExtendedPoint) -> Result<Gradient> {
        Ok(Gradient { d_gamma: C64::new(1.0, 0.0), d_mu: BlockOperator::zeros(p.dims()) })
    }
}

/// Linear functional `F(γ, μ) = cγ + Tr_res(μX)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    pub c: C64,
    pub x: BlockOperator,
}

impl LinearFunctional {
    pub fn value(&self, p: &ExtendedPoint) -> Result<C64> {
        Ok(self.c * p.gamma + pairing(&p.mu, &self.x)?)
    }
}

impl GradientProvider for LinearFunctional {
    fn gradient(&self, _p: &ExtendedPoint) -> Result<Gradient> {
        Ok(Gradient { d_gamma: self.c, d_mu: self.x.clone() })
    }
}

/// The two members `({F,G}₁, {F,G}₂)` of the pencil for given gradients:
/// `{F,G}₁ = ⟨μ, [D₂F, D₂G]⟩` and `{F,G}₂ = −γ s(D₂F, D₂G)`.
pub fn pencil_parts(df: &BlockOperator, dg: &BlockOperator, p: &ExtendedPoint) -> Result<(C64, C64)> {
    let first = pairing(&p.mu, &df.try_commutator(dg)?)?;
    let second = -p.gamma * schwinger(df, dg)?;
    Ok((first, second))
}

/// `{F,G}_ε = {F,G}₁ + ε{F,G}₂`; `ε = 1` is the Lie-Poisson bracket of
/// `C ⊕ L¹_res`.
pub fn poisson_bracket(f: &dyn GradientProvider, g: &dyn GradientProvider, p: &ExtendedPoint, epsilon: f64) -> Result<C64> {
    let df = f.gradient(p)?;
    let dg = g.gradient(p)?;
    let (first, second) = pencil_parts(&df.d_mu, &dg.d_mu, p)?;
    Ok(first + second * epsilon)
}

/// `dμ/dt = −[μ, D₂h] + γ(P₊D₂hP₋ − P₋D₂hP₊)`, the μ-part of
/// `−ad*_{Dh}(γ, μ)`; γ does not move.
pub fn hamiltonian_vector_field(d_mu: &BlockOperator, p: &ExtendedPoint) -> Result<BlockOperator> {
    let comm = p.mu.try_commutator(d_mu)?;
    Ok(&d_mu.p_plus_commutator().scale(p.gamma) - &comm)
}

/// Default central-difference step for [`numeric_gradient`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference gradient of a scalar field. Each matrix entry is probed
/// along its real and imaginary direction and the two slopes are combined as a
/// Wirtinger derivative, which is the complex derivative for holomorphic `f`.
pub fn numeric_gradient<F>(f: F, p: &ExtendedPoint, step: f64) -> Result<Gradient>
where
    F: Fn(&ExtendedPoint) -> Result<C64>,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {step}")));
    }
    let eval = |q: &ExtendedPoint| -> Result<C64> {
        let v = f(q)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite("scalar field value".into()));
        }
        Ok(v)
    };
    let h = C64::new(step, 0.0);
    let ih = C64::new(0.0, step);
    let wirtinger = |dre: C64, dim: C64| (dre - C64::new(0.0, 1.0) * dim) * 0.5;

    let shift_gamma = |dz: C64| ExtendedPoint::new(p.gamma + dz, p.mu.clone());
    let dre = (eval(&shift_gamma(h))? - eval(&shift_gamma(-h))?) / (2.0 * step);
    let dim = (eval(&shift_gamma(ih))? - eval(&shift_gamma(-ih))?) / (2.0 * step);
    let d_gamma = wirtinger(dre, dim);

    let dims = p.dims();
    let n = dims.total();
    let mut d_mu = crate::CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let shift_entry = |dz: C64| {
                let mut m = p.mu.matrix().clone();
                m[(i, j)] += dz;
                ExtendedPoint::new(p.gamma, BlockOperator::from_matrix(dims, m).expect("shape preserved"))
            };
            let dre = (eval(&shift_entry(h))? - eval(&shift_entry(-h))?) / (2.0 * step);
            let dim = (eval(&shift_entry(ih))? - eval(&shift_entry(-ih))?) / (2.0 * step);
            // ⟨μ, X⟩ = Σ μ_ij X_ji, so ∂f/∂μ_ij lands at (j, i)
            d_mu[(j, i)] = wirtinger(dre, dim);
        }
    }
    Ok(Gradient { d_gamma, d_mu: BlockOperator::from_matrix(dims, d_mu)? })
}
