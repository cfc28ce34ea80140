use super::polys::w_table;
use crate::error::{Error, Result};
use crate::lie_poisson::Gradient;
use crate::linalg;
use crate::polarized::{BlockOperator, ExtendedPoint};
use crate::C64;

/// `|κ|(‖μ‖_* + |λγ|)`, rejected unless strictly below one.
pub fn check_radius(kappa: C64, lambda: C64, p: &ExtendedPoint) -> Result<f64> {
    let value = kappa.norm() * (p.mu.star_norm() + (lambda * p.gamma).norm());
    if !value.is_finite() || value >= 1.0 {
        return Err(Error::RadiusViolation { value, limit: 1.0 });
    }
    Ok(value)
}

fn shifted_x(lambda: C64, p: &ExtendedPoint) -> BlockOperator {
    p.mu.add_p_plus(lambda * p.gamma)
}

/// `y = (1 − κ(μ + λγP₊))⁻¹`.
pub fn generating_y(kappa: C64, lambda: C64, p: &ExtendedPoint) -> Result<BlockOperator> {
    check_radius(kappa, lambda, p)?;
    let one_minus = &BlockOperator::identity(p.dims()) - &shifted_x(lambda, p).scale(kappa);
    BlockOperator::from_matrix(p.dims(), linalg::inverse(one_minus.matrix())?)
}

/// Inverse of [`generating_y`]: `μ = (1 − y⁻¹)/κ − λγP₊`.
pub fn y_to_mu(kappa: C64, lambda: C64, gamma: C64, y: &BlockOperator) -> Result<BlockOperator> {
    if kappa.norm() == 0.0 {
        return Err(Error::Domain("κ = 0 does not determine μ from y".into()));
    }
    let yinv = BlockOperator::from_matrix(y.dims(), linalg::inverse(y.matrix())?)?;
    let x = (&BlockOperator::identity(y.dims()) - &yinv).scale(kappa.inv());
    Ok(x.add_p_plus(-lambda * gamma))
}

/// `dy/dt = −α[y, yP₊y]`.
pub fn gen_y_rhs(alpha: C64, y: &BlockOperator) -> BlockOperator {
    let ypy = &y.p_plus_right() * y;
    y.commutator(&ypy).scale(-alpha)
}

// d/dz of log(1 − z)/z
fn log1m_over_derivative(z: C64) -> C64 {
    if z.norm() < 1e-2 {
        let mut acc = C64::default();
        let mut pow = C64::new(1.0, 0.0);
        for k in 1..=16 {
            acc += pow * (k as f64 / (k + 1) as f64);
            pow *= z;
        }
        -acc
    } else {
        let one = C64::new(1.0, 0.0);
        (-z / (one - z) - (one - z).ln()) / (z * z)
    }
}

/// Closed form of the generating Hamiltonian with `X = μ + λγP₊`:
/// `−(1/κ) Tr_res log(1 − κX) + Tr_res X · log(1 − κλγ)/(κλγ)`.
///
/// This is the sum of `Σ_{k≥1} κ^k/(k+1) Σ_n λⁿ h^k_n`.
pub fn generating_hamiltonian(kappa: C64, lambda: C64, p: &ExtendedPoint) -> Result<C64> {
    check_radius(kappa, lambda, p)?;
    if kappa.norm() == 0.0 {
        return Ok(C64::default());
    }
    let x = shifted_x(lambda, p);
    let tr_log = linalg::trace_log_one_minus(x.scale(kappa).matrix())?;
    let z = kappa * lambda * p.gamma;
    Ok(-tr_log / kappa + x.restricted_trace() * linalg::log1m_over(z))
}

/// `D₂h = (1 − κX)⁻¹ + log(1 − κλγ)/(κλγ)` together with `D₁h`.
pub fn generating_gradient(kappa: C64, lambda: C64, p: &ExtendedPoint) -> Result<Gradient> {
    let y = generating_y(kappa, lambda, p)?;
    let z = kappa * lambda * p.gamma;
    let g = linalg::log1m_over(z);
    let n_plus = p.dims().n_plus as f64;
    let tr_x = shifted_x(lambda, p).restricted_trace();
    let d_gamma = lambda * (y.app().trace() + g * n_plus + kappa * tr_x * log1m_over_derivative(z));
    Ok(Gradient { d_gamma, d_mu: y.add_identity(g) })
}

/// Partial sum of the defining series with an a priori bound on the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingSeries {
    pub value: C64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// `Σ_{k=1}^{terms} κ^k/(k+1) Σ_{n≤k} λⁿ h^k_n(γ, μ)`, with `h^k_n` taken from
/// their definition through `W^{k+1}_n`. The tail bound uses
/// `|Tr_res A| ≤ ‖A‖_*` and `‖(μ+βP₊)^{k+1} − β^k(μ+βP₊)‖_* ≤ (‖μ‖_* + |β|)^{k+1}`.
pub fn generating_series(kappa: C64, lambda: C64, p: &ExtendedPoint, terms: usize) -> Result<GeneratingSeries> {
    let q = check_radius(kappa, lambda, p)?;
    let table = w_table(terms + 1, &p.mu);
    let tr_mu = p.mu.restricted_trace();
    let mut value = C64::default();
    let mut kappa_pow = C64::new(1.0, 0.0);
    for k in 1..=terms {
        kappa_pow *= kappa;
        let mut inner = C64::default();
        let mut lg = C64::new(1.0, 0.0);
        for n in 0..=k {
            let mut tr = table[k + 1][n].restricted_trace();
            if n == k {
                tr -= tr_mu;
            }
            inner += lg * tr;
            lg *= lambda * p.gamma;
        }
        value += kappa_pow * inner / (k + 1) as f64;
    }
    let r = p.mu.star_norm() + (lambda * p.gamma).norm();
    let tail_bound = r * q.powi(terms as i32 + 1) / ((terms + 2) as f64 * (1.0 - q));
    Ok(GeneratingSeries { value, terms, tail_bound })
}
