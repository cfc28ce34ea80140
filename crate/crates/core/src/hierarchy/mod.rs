//! Polynomial machinery, Casimirs, Hamiltonians in involution and the flows
//! they generate.

mod casimir;
mod flows;
mod generating;
mod hamiltonians;
mod pcoeff;
mod polys;
mod tau;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::C64;

pub use casimir::{casimir, casimir_dense, casimir_gradient};
pub use flows::{flow_rhs, lax_generator, LaxGenerator, LaxVariable, REAL_FORM_FLOW_TOLERANCE};
pub use generating::{
    check_radius, gen_y_rhs, generating_gradient, generating_hamiltonian, generating_series, generating_y, y_to_mu,
    GeneratingSeries,
};
pub use hamiltonians::{grad_hamiltonian, hamiltonian, hamiltonian_gradient, hbasis_coefficients, Hamiltonian};
pub use pcoeff::{p_coeff, PCoeffTable};
pub use polys::{h_poly, h_table, w_poly, w_table, w_table_right, H_ENUMERATION_MAX_L};
pub use tau::{tau_reparametrization_check, TauCheck};

/// Which member of the hierarchy drives a flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianId {
    /// `h^k_n`, `k ≥ 1`, `0 ≤ n ≤ k`.
    Wbasis { k: usize, n: usize },
    /// The Hamiltonian whose flow is `[μ − γP₊, H^l_n]`, `0 ≤ n ≤ l+1`.
    Hbasis { l: usize, n: usize },
    /// The generating Hamiltonian `h_{κ,λ}`.
    Generating { kappa: C64, lambda: C64 },
}

impl HamiltonianId {
    /// Whether [`flow_rhs`] has a presentation of this Hamiltonian in `form`.
    pub fn supports(&self, form: FlowForm) -> bool {
        match self {
            HamiltonianId::Wbasis { .. } => matches!(form, FlowForm::W | FlowForm::Mu | FlowForm::PPlus),
            HamiltonianId::Hbasis { .. } => matches!(form, FlowForm::H | FlowForm::Real),
            HamiltonianId::Generating { .. } => matches!(form, FlowForm::W | FlowForm::PPlus | FlowForm::GenY),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            HamiltonianId::Wbasis { k, n } => {
                if k == 0 || n > k {
                    return Err(Error::IndexOutOfRange(format!("Wbasis(k={k}, n={n}) needs k ≥ 1 and n ≤ k")));
                }
            }
            HamiltonianId::Hbasis { l, n } => {
                if n > l + 1 {
                    return Err(Error::IndexOutOfRange(format!("Hbasis(l={l}, n={n}) needs n ≤ l+1")));
                }
            }
            HamiltonianId::Generating { kappa, lambda } => {
                if !(kappa.re.is_finite() && kappa.im.is_finite() && lambda.re.is_finite() && lambda.im.is_finite()) {
                    return Err(Error::NonFinite("generating parameters".into()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for HamiltonianId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HamiltonianId::Wbasis { k, n } => write!(f, "W({k},{n})"),
            HamiltonianId::Hbasis { l, n } => write!(f, "H({l},{n})"),
            HamiltonianId::Generating { kappa, lambda } => write!(f, "G({kappa},{lambda})"),
        }
    }
}

impl FromStr for HamiltonianId {
    type Err = Error;

    /// Parses the `Display` forms `W(k,n)`, `H(l,n)` and `G(κ,λ)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFlow(format!("unknown Hamiltonian `{s}`; expected W(k,n), H(l,n) or G(kappa,lambda)"));
        let t = s.trim();
        let (head, rest) = t.split_at(t.find('(').ok_or_else(bad)?);
        let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let (a, b) = (a.trim(), b.trim());
        let idx = |v: &str| v.parse::<usize>().map_err(|_| bad());
        let cx = |v: &str| v.parse::<C64>().map_err(|_| bad());
        let id = match head.trim().to_ascii_uppercase().as_str() {
            "W" => HamiltonianId::Wbasis { k: idx(a)?, n: idx(b)? },
            "H" => HamiltonianId::Hbasis { l: idx(a)?, n: idx(b)? },
            "G" => HamiltonianId::Generating { kappa: cx(a)?, lambda: cx(b)? },
            _ => return Err(bad()),
        };
        id.validate()?;
        Ok(id)
    }
}

/// Presentation of a flow's right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowForm {
    /// `−(k+1)γⁿ[μ − γP₊, W^k_n]`.
    W,
    /// `−(k+1)γⁿ[μ, W^k_n + γW^k_{n+1}]`.
    Mu,
    /// `(k+1)γⁿ[P₊, γW^k_n + W^k_{n−1}]`.
    PPlus,
    /// `[μ − γP₊, H^l_n]`.
    H,
    /// `i^{l+1}[μ − γP₊, H^l_n]` on the real form.
    Real,
    /// `dy/dt` for `y = (1 − κ(μ + λγP₊))⁻¹`.
    GenY,
}

impl FlowForm {
    pub const ALL: [FlowForm; 6] = [FlowForm::W, FlowForm::Mu, FlowForm::PPlus, FlowForm::H, FlowForm::Real, FlowForm::GenY];

    pub fn name(&self) -> &'static str {
        match self {
            FlowForm::W => "W_form",
            FlowForm::Mu => "MU_form",
            FlowForm::PPlus => "PPLUS_form",
            FlowForm::H => "H_form",
            FlowForm::Real => "REAL_form",
            FlowForm::GenY => "GEN_Y_form",
        }
    }
}

impl fmt::Display for FlowForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlowForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase();
        let key = key.strip_suffix("_FORM").unwrap_or(&key);
        match key {
            "W" => Ok(FlowForm::W),
            "MU" => Ok(FlowForm::Mu),
            "PPLUS" => Ok(FlowForm::PPlus),
            "H" => Ok(FlowForm::H),
            "REAL" => Ok(FlowForm::Real),
            "GEN_Y" => Ok(FlowForm::GenY),
            _ => Err(Error::InvalidFlow(format!("unknown flow form `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_names_round_trip() {
        for f in FlowForm::ALL {
            assert_eq!(f.name().parse::<FlowForm>().unwrap(), f);
        }
        assert_eq!("pplus".parse::<FlowForm>().unwrap(), FlowForm::PPlus);
        assert!("Q_form".parse::<FlowForm>().is_err());
    }

    #[test]
    fn id_ranges() {
        assert!(HamiltonianId::Wbasis { k: 0, n: 0 }.validate().is_err());
        assert!(HamiltonianId::Wbasis { k: 3, n: 4 }.validate().is_err());
        assert!(HamiltonianId::Wbasis { k: 3, n: 3 }.validate().is_ok());
        assert!(HamiltonianId::Hbasis { l: 2, n: 3 }.validate().is_ok());
        assert!(HamiltonianId::Hbasis { l: 2, n: 4 }.validate().is_err());
        let nan = C64::new(f64::NAN, 0.0);
        assert!(HamiltonianId::Generating { kappa: nan, lambda: C64::default() }.validate().is_err());
    }

    #[test]
    fn id_parse_round_trip() {
        let ids = [
            HamiltonianId::Wbasis { k: 3, n: 1 },
            HamiltonianId::Hbasis { l: 2, n: 0 },
            HamiltonianId::Generating { kappa: C64::new(0.1, -0.2), lambda: C64::new(0.5, 0.0) },
        ];
        for id in ids {
            assert_eq!(id.to_string().parse::<HamiltonianId>().unwrap(), id);
        }
        assert_eq!(" h( 3 , 0 ) ".parse::<HamiltonianId>().unwrap(), HamiltonianId::Hbasis { l: 3, n: 0 });
        assert!("W(0,0)".parse::<HamiltonianId>().is_err());
        assert!("X(1,1)".parse::<HamiltonianId>().is_err());
        assert!("W(1)".parse::<HamiltonianId>().is_err());
    }
}
