use crate::error::{Error, Result};
use crate::integrators::Trajectory;
use crate::linalg;
use crate::polarized::{BlockOperator, Dims, ExtendedPoint};
use crate::{CMatrix, C64};

/// Relative threshold on the pivoted-QR diagonal below which a basis is
/// declared rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Affine coordinate `z = βα⁻¹ : H₊ → H₋` of a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint {
    pub z: CMatrix,
}

impl GrassmannPoint {
    /// Columns `[1; z]` spanning the subspace.
    pub fn basis(&self) -> CMatrix {
        let (m, p) = self.z.shape();
        let mut b = CMatrix::zeros(p + m, p);
        b.view_mut((0, 0), (p, p)).copy_from(&linalg::identity(p));
        b.view_mut((p, 0), (m, p)).copy_from(&self.z);
        b
    }

    /// Sorted eigenvalues of the hermitian `z⁺z`.
    pub fn zz_spectrum(&self) -> Vec<f64> {
        let zz = self.z.adjoint() * &self.z;
        let mut ev: Vec<f64> = zz.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Orthonormal basis of the column span, by QR with column pivoting.
pub fn orthonormal_basis(basis: &CMatrix) -> Result<CMatrix> {
    let cols = basis.ncols();
    if cols == 0 || basis.nrows() < cols {
        return Err(Error::RankDeficient);
    }
    let qr = basis.clone().col_piv_qr();
    let r = qr.r();
    let lead = r[(0, 0)].norm();
    if !(lead > 0.0) || (0..cols).any(|i| r[(i, i)].norm() <= RANK_TOLERANCE * lead) {
        return Err(Error::RankDeficient);
    }
    Ok(qr.q().columns(0, cols).into_owned())
}

/// `ι_γ(W) = (γ, γ(P₊ − P_W))` for the span `W` of `basis`, whose column count
/// must equal `n₊`.
pub fn grassmann_embed(gamma: C64, basis: &CMatrix, dims: Dims) -> Result<ExtendedPoint> {
    if basis.nrows() != dims.total() || basis.ncols() != dims.n_plus {
        return Err(Error::ShapeMismatch(format!(
            "basis is {}×{}, expected {}×{}",
            basis.nrows(),
            basis.ncols(),
            dims.total(),
            dims.n_plus
        )));
    }
    let q = orthonormal_basis(basis)?;
    let pw = BlockOperator::from_matrix(dims, &q * q.adjoint())?;
    let mu = (&BlockOperator::p_plus(dims) - &pw).scale(gamma);
    Ok(ExtendedPoint::new(gamma, mu))
}

/// `ι_γ` of the subspace with coordinate `z`.
pub fn grassmann_from_z(gamma: C64, z: &GrassmannPoint) -> Result<ExtendedPoint> {
    let dims = Dims::new(z.z.ncols(), z.z.nrows())?;
    grassmann_embed(gamma, &z.basis(), dims)
}

/// The block matrix
/// `[[(1+z⁺z)⁻¹ − 1, (1+z⁺z)⁻¹z⁺], [z(1+z⁺z)⁻¹, z(1+z⁺z)⁻¹z⁺]]`.
pub fn z_display(z: &GrassmannPoint) -> Result<BlockOperator> {
    let dims = Dims::new(z.z.ncols(), z.z.nrows())?;
    let zh = z.z.adjoint();
    let g = linalg::inverse(&(linalg::identity(dims.n_plus) + &zh * &z.z))?;
    let app = &g - linalg::identity(dims.n_plus);
    let apm = &g * &zh;
    let amp = &z.z * &g;
    let amm = &z.z * &g * &zh;
    BlockOperator::from_blocks(dims, &app, &apm, &amp, &amm)
}

/// Least-squares scalar `c` with `display ≈ c·μ`; `None` when `μ = 0`.
pub fn display_fit(display: &BlockOperator, mu: &BlockOperator) -> Option<C64> {
    let mm: f64 = mu.matrix().iter().map(|z| z.norm_sqr()).sum();
    if mm == 0.0 {
        return None;
    }
    let dot: C64 = mu.matrix().iter().zip(display.matrix().iter()).map(|(a, b)| a.conj() * b).sum();
    Some(dot / mm)
}

/// Tolerance on the projector recovered from `μ`.
const ORBIT_TOLERANCE: f64 = 1e-8;

/// Recovers `z` from a point of the orbit through `(γ, 0)`:
/// `P_W = P₊ − μ/γ`, `z = (P_W)₋₊ ((P_W)₊₊)⁻¹`.
pub fn z_coordinate(p: &ExtendedPoint) -> Result<GrassmannPoint> {
    if p.gamma.norm() == 0.0 {
        return Err(Error::NotOnOrbit("γ = 0".into()));
    }
    let dims = p.dims();
    let pw = BlockOperator::p_plus(dims) - p.mu.scale(p.gamma.inv());
    let pwm = pw.matrix();
    let scale = 1.0 + linalg::frobenius_norm(pwm);
    let idem = linalg::frobenius_norm(&(pwm * pwm - pwm));
    let herm = linalg::frobenius_norm(&(pwm - pwm.adjoint()));
    if idem > ORBIT_TOLERANCE * scale || herm > ORBIT_TOLERANCE * scale {
        return Err(Error::NotOnOrbit(format!("P₊ − μ/γ is not an orthogonal projector ({idem:.2e}, {herm:.2e})")));
    }
    let alpha = linalg::checked_inverse(&pw.app(), linalg::DEFAULT_SINGULAR_THRESHOLD)?;
    Ok(GrassmannPoint { z: pw.amp() * alpha })
}

/// Largest drift of the sorted spectrum of `z⁺z` along `traj`.
pub fn grassmann_zz_invariance(traj: &Trajectory) -> Result<f64> {
    let mut reference: Option<Vec<f64>> = None;
    let mut worst = 0.0f64;
    for p in &traj.points {
        let spec = z_coordinate(p)?.zz_spectrum();
        match &reference {
            None => reference = Some(spec),
            Some(r) => {
                for (a, b) in r.iter().zip(spec.iter()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    Ok(worst)
}
