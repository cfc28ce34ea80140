use super::pcoeff::p_coeff;
use super::polys::{h_table, w_table};
use crate::error::{Error, Result};
use crate::polarized::{BlockOperator, ExtendedPoint};
use crate::C64;

/// Outcome of comparing the `W`-basis flow `h^k_{k−l}` with the
/// `p`-weighted combination `C = Σ_n max{0, p^l_n(k)} [μ − γP₊, H^l_n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauCheck {
    /// `‖rhs − expected·C‖_F` with `expected = −(k+1)γ^{k−l}`.
    pub residual: f64,
    /// Least-squares scalar `c` minimising `‖rhs − c·C‖_F`; `None` when `C`
    /// vanishes.
    pub fitted: Option<C64>,
    pub fitted_residual: Option<f64>,
    pub expected: C64,
    /// The alternative prefactor `(k−1)γ^{k−l}`.
    pub alternative: C64,
    pub alternative_residual: f64,
}

/// Measures the scalar relating the two presentations of the flow.
pub fn tau_reparametrization_check(l: usize, k: usize, p: &ExtendedPoint) -> Result<TauCheck> {
    if k <= l {
        return Err(Error::IndexOutOfRange(format!("need k > l, got k={k}, l={l}")));
    }
    let nu = p.shifted();
    let w = w_table(k, &p.mu);
    let n = k - l;
    let g = p.gamma.powu(n as u32);
    let rhs = nu.try_commutator(&w[k][n])?.scale(g * -((k + 1) as f64));

    let h = h_table(l, &p.mu);
    let mut comb = BlockOperator::zeros(p.dims());
    for m in 1..=l + 1 {
        let c = p_coeff(l, m, k as i64).max(0);
        if c != 0 {
            comb = &comb + &nu.try_commutator(&h[l][m])?.scale_re(c as f64);
        }
    }

    let expected = g * -((k + 1) as f64);
    let alternative = g * (k as f64 - 1.0);
    let residual = (&rhs - &comb.scale(expected)).frobenius_norm();
    let alternative_residual = (&rhs - &comb.scale(alternative)).frobenius_norm();

    let cc: f64 = comb.matrix().iter().map(|z| z.norm_sqr()).sum();
    let (fitted, fitted_residual) = if cc > 0.0 {
        let dot: C64 = comb.matrix().iter().zip(rhs.matrix().iter()).map(|(a, b)| a.conj() * b).sum();
        let c = dot / cc;
        (Some(c), Some((&rhs - &comb.scale(c)).frobenius_norm()))
    } else {
        (None, None)
    };
    Ok(TauCheck { residual, fitted, fitted_residual, expected, alternative, alternative_residual })
}
