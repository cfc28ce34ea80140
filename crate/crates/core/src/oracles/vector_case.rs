use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hierarchy::{hamiltonian, HamiltonianId};
use crate::linalg;
use crate::polarized::{BlockOperator, Dims, ExtendedPoint};
use crate::{CMatrix, CVector, C64};

/// `μ = [[a, v⁺], [w, A]]` with `dim H₊ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCaseState {
    pub a: C64,
    pub v: CVector,
    pub w: CVector,
    pub big_a: CMatrix,
}

impl VectorCaseState {
    pub fn dims(&self) -> Result<Dims> {
        let m = self.v.len();
        if self.w.len() != m || self.big_a.shape() != (m, m) {
            return Err(Error::ShapeMismatch(format!(
                "v: {}, w: {}, A: {}×{}",
                self.v.len(),
                self.w.len(),
                self.big_a.nrows(),
                self.big_a.ncols()
            )));
        }
        Dims::new(1, m)
    }

    pub fn from_operator(mu: &BlockOperator) -> Result<Self> {
        if mu.dims().n_plus != 1 {
            return Err(Error::Domain(format!("vector case needs n₊ = 1, got {}", mu.dims().n_plus)));
        }
        Ok(Self {
            a: mu.app()[(0, 0)],
            v: mu.apm().adjoint().column(0).into_owned(),
            w: mu.amp().column(0).into_owned(),
            big_a: mu.amm(),
        })
    }

    pub fn to_operator(&self) -> Result<BlockOperator> {
        let dims = self.dims()?;
        let app = CMatrix::from_element(1, 1, self.a);
        let apm = CMatrix::from_columns(std::slice::from_ref(&self.v)).adjoint();
        let amp = CMatrix::from_columns(std::slice::from_ref(&self.w));
        BlockOperator::from_blocks(dims, &app, &apm, &amp, &self.big_a)
    }

    /// Largest componentwise distance over `a`, `v`, `w`, `A`.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d = (self.a - other.a).norm();
        for (x, y) in self.v.iter().zip(other.v.iter()).chain(self.w.iter().zip(other.w.iter())) {
            d = d.max((x - y).norm());
        }
        for (x, y) in self.big_a.iter().zip(other.big_a.iter()) {
            d = d.max((x - y).norm());
        }
        d
    }
}

/// `M_k = Σ_{j<k} (μ^j)₊₊ A^{k−1−j}`, so that `(μ^k)₋₊ = M_k w` and
/// `(μ^k)₊₋ = v⁺ M_k`.
pub fn m_k(state: &VectorCaseState, k: usize) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::IndexOutOfRange("M_k needs k ≥ 1".into()));
    }
    let mu = state.to_operator()?;
    let m = state.big_a.nrows();
    let mut head = Vec::with_capacity(k);
    let mut power = BlockOperator::identity(mu.dims());
    for _ in 0..k {
        head.push(power.app()[(0, 0)]);
        power = &power * &mu;
    }
    let mut acc = CMatrix::zeros(m, m);
    let mut a_pow = linalg::identity(m);
    for j in (0..k).rev() {
        acc += &a_pow * head[j];
        a_pow = &a_pow * &state.big_a;
    }
    Ok(acc)
}

/// Closed-form solution of the commuting `τ^k_0` flows from `state0`:
/// `w(τ) = exp(γ Σ M_k τ_k) w₀` and `v⁺(τ) = v₀⁺ exp(−γ Σ M_k τ_k)`; `a` and
/// `A` do not move.
pub fn vector_case_solution(state0: &VectorCaseState, gamma: C64, taus: &BTreeMap<usize, f64>) -> Result<VectorCaseState> {
    let m = state0.dims()?.n_minus;
    let mut gen = CMatrix::zeros(m, m);
    for (&k, &tau) in taus {
        if tau != 0.0 {
            gen += m_k(state0, k)? * (gamma * tau);
        }
    }
    let fwd = linalg::expm(&gen)?;
    let back = linalg::expm(&(-&gen))?;
    Ok(VectorCaseState {
        a: state0.a,
        v: back.adjoint() * &state0.v,
        w: fwd * &state0.w,
        big_a: state0.big_a.clone(),
    })
}

/// `|Tr_res(μ^{k₁}P₊ ⋯ μ^{kₙ}P₊) − Π h^{kᵢ}_1 / (γ(kᵢ+1))|` at a point with
/// `n₊ = 1`, for exponents `kᵢ ≥ 2` (for `k = 1` the top Hamiltonian `h¹₁`
/// carries an extra `−γ Tr_res μ`).
pub fn product_identity_residual(p: &ExtendedPoint, ks: &[usize]) -> Result<f64> {
    if p.dims().n_plus != 1 {
        return Err(Error::Domain("product identity needs n₊ = 1".into()));
    }
    if p.gamma.norm() == 0.0 {
        return Err(Error::Domain("γ = 0".into()));
    }
    let mut word = BlockOperator::identity(p.dims());
    let mut product = C64::new(1.0, 0.0);
    for &k in ks {
        if k < 2 {
            return Err(Error::IndexOutOfRange("product identity needs kᵢ ≥ 2".into()));
        }
        let mut power = BlockOperator::identity(p.dims());
        for _ in 0..k {
            power = &power * &p.mu;
        }
        word = (&word * &power).p_plus_right();
        product *= hamiltonian(&HamiltonianId::Wbasis { k, n: 1 }, p)? / (p.gamma * (k + 1) as f64);
    }
    Ok((word.restricted_trace() - product).norm())
}
