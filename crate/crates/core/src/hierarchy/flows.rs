use super::generating::{gen_y_rhs, generating_y};
use super::polys::{h_poly, w_table};
use super::{FlowForm, HamiltonianId};
use crate::error::{Error, Result};
use crate::polarized::{BlockOperator, ExtendedPoint};
use crate::C64;

/// Largest real-form residual accepted by `REAL_form` right-hand sides.
pub const REAL_FORM_FLOW_TOLERANCE: f64 = 1e-9;

fn invalid(id: &HamiltonianId, form: FlowForm) -> Error {
    Error::InvalidFlow(format!("{form} is not available for {id}"))
}

fn i_pow(e: usize) -> C64 {
    match e % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Right-hand side of the flow of `id` in presentation `form`.
///
/// Returns `dμ/dt`, or `dy/dt` for [`FlowForm::GenY`]; `γ` never moves.
pub fn flow_rhs(id: &HamiltonianId, form: FlowForm, p: &ExtendedPoint) -> Result<BlockOperator> {
    id.validate()?;
    let nu = p.shifted();
    match (*id, form) {
        (HamiltonianId::Wbasis { k, n }, FlowForm::W) => {
            let table = w_table(k, &p.mu);
            let c = p.gamma.powu(n as u32) * -((k + 1) as f64);
            Ok(nu.try_commutator(&table[k][n])?.scale(c))
        }
        (HamiltonianId::Wbasis { k, n }, FlowForm::Mu) => {
            let table = w_table(k, &p.mu);
            let mut inner = table[k][n].clone();
            if n < k {
                inner = &inner + &table[k][n + 1].scale(p.gamma);
            }
            let c = p.gamma.powu(n as u32) * -((k + 1) as f64);
            Ok(p.mu.try_commutator(&inner)?.scale(c))
        }
        (HamiltonianId::Wbasis { k, n }, FlowForm::PPlus) => {
            let table = w_table(k, &p.mu);
            let mut inner = table[k][n].scale(p.gamma);
            if n >= 1 {
                inner = &inner + &table[k][n - 1];
            }
            let c = p.gamma.powu(n as u32) * (k + 1) as f64;
            Ok(inner.p_plus_commutator().scale(c))
        }
        (HamiltonianId::Hbasis { l, n }, FlowForm::H) => Ok(nu.try_commutator(&h_poly(l, n, &p.mu)?)?),
        (HamiltonianId::Hbasis { l, n }, FlowForm::Real) => {
            let r = p.real_form_residual();
            if r > REAL_FORM_FLOW_TOLERANCE {
                return Err(Error::NotRealForm(r));
            }
            Ok(nu.try_commutator(&h_poly(l, n, &p.mu)?)?.scale(i_pow(l + 1)))
        }
        (HamiltonianId::Generating { kappa, lambda }, FlowForm::W) => {
            let y = generating_y(kappa, lambda, p)?;
            Ok(-&nu.try_commutator(&y)?)
        }
        (HamiltonianId::Generating { kappa, lambda }, FlowForm::PPlus) => {
            let y = generating_y(kappa, lambda, p)?;
            Ok(y.p_plus_commutator().scale(p.gamma * (lambda + 1.0)))
        }
        (HamiltonianId::Generating { kappa, lambda }, FlowForm::GenY) => {
            let y = generating_y(kappa, lambda, p)?;
            Ok(gen_y_rhs(kappa * (lambda + 1.0) * p.gamma, &y))
        }
        (id, form) => Err(invalid(&id, form)),
    }
}

/// Which operator a Lax generator conjugates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaxVariable {
    /// `ν = μ − γP₊`.
    Shifted,
    /// `μ` itself.
    Mu,
}

/// `B` with `dv/dt = [v, B]` for the variable `v` named by `variable`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxGenerator {
    pub variable: LaxVariable,
    pub b: BlockOperator,
}

/// Lax generator of the flow, for forms that are commutators with the evolving
/// operator.
pub fn lax_generator(id: &HamiltonianId, form: FlowForm, p: &ExtendedPoint) -> Result<LaxGenerator> {
    id.validate()?;
    match (*id, form) {
        (HamiltonianId::Wbasis { k, n }, FlowForm::W) => {
            let table = w_table(k, &p.mu);
            let c = p.gamma.powu(n as u32) * -((k + 1) as f64);
            Ok(LaxGenerator { variable: LaxVariable::Shifted, b: table[k][n].scale(c) })
        }
        (HamiltonianId::Wbasis { k, n }, FlowForm::Mu) => {
            let table = w_table(k, &p.mu);
            let mut inner = table[k][n].clone();
            if n < k {
                inner = &inner + &table[k][n + 1].scale(p.gamma);
            }
            let c = p.gamma.powu(n as u32) * -((k + 1) as f64);
            Ok(LaxGenerator { variable: LaxVariable::Mu, b: inner.scale(c) })
        }
        (HamiltonianId::Hbasis { l, n }, FlowForm::H) => {
            Ok(LaxGenerator { variable: LaxVariable::Shifted, b: h_poly(l, n, &p.mu)? })
        }
        (HamiltonianId::Hbasis { l, n }, FlowForm::Real) => {
            let r = p.real_form_residual();
            if r > REAL_FORM_FLOW_TOLERANCE {
                return Err(Error::NotRealForm(r));
            }
            Ok(LaxGenerator { variable: LaxVariable::Shifted, b: h_poly(l, n, &p.mu)?.scale(i_pow(l + 1)) })
        }
        (HamiltonianId::Generating { kappa, lambda }, FlowForm::W) => {
            Ok(LaxGenerator { variable: LaxVariable::Shifted, b: -&generating_y(kappa, lambda, p)? })
        }
        (id, form) => Err(invalid(&id, form)),
    }
}
