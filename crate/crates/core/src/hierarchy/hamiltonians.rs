use super::generating::{generating_gradient, generating_hamiltonian};
use super::pcoeff::p_coeff;
use super::polys::{h_poly, w_table};
use super::HamiltonianId;
use crate::error::Result;
use crate::lie_poisson::{Gradient, GradientProvider};
use crate::polarized::{BlockOperator, ExtendedPoint};
use crate::C64;

/// Integer matrix `a` with `H^l_n = Σ_m a[n−1][m−1] W^{l+m}_m` for
/// `1 ≤ n, m ≤ l+1`: the inverse of the unit lower-triangular block
/// `max{0, p^l_n(l+m)}`.
pub fn hbasis_coefficients(l: usize) -> Vec<Vec<i64>> {
    let size = l + 1;
    let p: Vec<Vec<i64>> = (1..=size)
        .map(|m| (1..=size).map(|n| p_coeff(l, n, (l + m) as i64).max(0)).collect())
        .collect();
    let mut inv = vec![vec![0i64; size]; size];
    for col in 0..size {
        for row in 0..size {
            let mut v = if row == col { 1 } else { 0 };
            for j in 0..row {
                v -= p[row][j] * inv[j][col];
            }
            inv[row][col] = v / p[row][row];
        }
    }
    inv
}

/// Value of the Hamiltonian `id` at `p`.
///
/// `h^k_n = γⁿ Tr_res W^{k+1}_n(μ)` for `n < k` and
/// `h^k_k = γ^k Tr_res(W^{k+1}_k(μ) − μ)`. For `Hbasis(l, n)` the value is the
/// combination of `Tr_res W^{l+m+1}_m / (l+m+1)` whose gradient is `−H^l_n`.
pub fn hamiltonian(id: &HamiltonianId, p: &ExtendedPoint) -> Result<C64> {
    id.validate()?;
    match *id {
        HamiltonianId::Wbasis { k, n } => {
            let table = w_table(k + 1, &p.mu);
            let mut tr = table[k + 1][n].restricted_trace();
            if n == k {
                tr -= p.mu.restricted_trace();
            }
            Ok(p.gamma.powu(n as u32) * tr)
        }
        HamiltonianId::Hbasis { l, n } => {
            if n == 0 {
                let table = w_table(l + 1, &p.mu);
                return Ok(-table[l + 1][0].restricted_trace() / (l + 1) as f64);
            }
            let a = hbasis_coefficients(l);
            let table = w_table(2 * l + 2, &p.mu);
            let mut acc = C64::default();
            for m in 1..=l + 1 {
                let c = a[n - 1][m - 1];
                if c != 0 {
                    let big_k = l + m + 1;
                    acc += table[big_k][m].restricted_trace() * (c as f64 / big_k as f64);
                }
            }
            Ok(-acc)
        }
        HamiltonianId::Generating { kappa, lambda } => generating_hamiltonian(kappa, lambda, p),
    }
}

/// `D₂h` for the Hamiltonian `id`: `(k+1)γⁿW^k_n(μ)` for `n < k`,
/// `γ^k((k+1)P₊ − 1)` for `n = k`, `−H^l_n(μ)` for the H-basis and
/// `(1 − κX)⁻¹ + log(1 − κλγ)/(κλγ)` for the generating Hamiltonian.
pub fn grad_hamiltonian(id: &HamiltonianId, p: &ExtendedPoint) -> Result<BlockOperator> {
    Ok(hamiltonian_gradient(id, p)?.d_mu)
}

/// Both partial derivatives `(D₁h, D₂h)`.
pub fn hamiltonian_gradient(id: &HamiltonianId, p: &ExtendedPoint) -> Result<Gradient> {
    id.validate()?;
    match *id {
        HamiltonianId::Wbasis { k, n } => {
            let table = w_table(k + 1, &p.mu);
            let d_mu = if n == k {
                BlockOperator::p_plus(p.dims()).scale_re((k + 1) as f64).add_identity(C64::new(-1.0, 0.0))
            } else {
                table[k][n].scale_re((k + 1) as f64)
            };
            let d_mu = d_mu.scale(p.gamma.powu(n as u32));
            let d_gamma = if n == 0 {
                C64::default()
            } else {
                let mut tr = table[k + 1][n].restricted_trace();
                if n == k {
                    tr -= p.mu.restricted_trace();
                }
                p.gamma.powu(n as u32 - 1) * tr * n as f64
            };
            Ok(Gradient { d_gamma, d_mu })
        }
        HamiltonianId::Hbasis { l, n } => Ok(Gradient { d_gamma: C64::default(), d_mu: -&h_poly(l, n, &p.mu)? }),
        HamiltonianId::Generating { kappa, lambda } => generating_gradient(kappa, lambda, p),
    }
}

/// A hierarchy Hamiltonian as a [`GradientProvider`] with analytic gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian(pub HamiltonianId);

impl Hamiltonian {
    pub fn value(&self, p: &ExtendedPoint) -> Result<C64> {
        hamiltonian(&self.0, p)
    }
}

impl GradientProvider for Hamiltonian {
    fn gradient(&self, p: &ExtendedPoint) -> Result<Gradient> {
        hamiltonian_gradient(&self.0, p)
    }
}
