//! Dense complex linear-algebra helpers shared by the other modules.

use nalgebra::Schur;

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Relative singularity threshold: a matrix is treated as singular when its
/// smallest singular value is below this fraction of the largest one.
pub const DEFAULT_SINGULAR_THRESHOLD: f64 = 1e-12;

/// Two eigenvalues closer than this are considered tied when sorting.
pub const SPECTRUM_TIE_TOLERANCE: f64 = 1e-12;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Singular values in non-increasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Schatten-1 norm, the sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Spectral norm, the largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Schatten-2 (Frobenius) norm.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Ratio of the smallest to the largest singular value (0 for the zero matrix).
pub fn inverse_condition(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// Inverts `m` with partial-pivot LU after checking its conditioning.
pub fn checked_inverse(m: &CMatrix, threshold: f64) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let ratio = inverse_condition(m);
    if !(ratio >= threshold) {
        return Err(Error::Singular { ratio, threshold });
    }
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::Singular { ratio, threshold })
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    checked_inverse(m, DEFAULT_SINGULAR_THRESHOLD)
}

/// Eigenvalues of a square complex matrix, read off the diagonal of its
/// complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch("eigenvalues of a non-square matrix".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("eigenvalue input".into()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 100_000).ok_or(Error::EigenNonConvergence)?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Sorts a spectrum lexicographically by (real, imaginary) part. Real parts
/// within [`SPECTRUM_TIE_TOLERANCE`] of the running group leader are treated
/// as equal so that roundoff does not reorder near-degenerate pairs.
pub fn sort_spectrum(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let lead = v[i].re;
        let mut j = i + 1;
        while j < v.len() && (v[j].re - lead).abs() <= SPECTRUM_TIE_TOLERANCE {
            j += 1;
        }
        let mut group = v[i..j].to_vec();
        group.sort_by(|a, b| a.im.total_cmp(&b.im));
        out.extend(group);
        i = j;
    }
    out
}

/// Distance between two spectra viewed as multisets: the largest displacement
/// of a greedy nearest-neighbour matching. Returns `f64::INFINITY` when the
/// sizes differ.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (j, y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if d < best_d {
                best_d = d;
                best = Some(j);
            }
        }
        if let Some(j) = best {
            used[j] = true;
        }
        worst = worst.max(best_d);
    }
    worst
}

/// Matrix exponential (scaling and squaring with a Padé approximant).
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch("exponential of a non-square matrix".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input".into()));
    }
    let e = m.exp();
    if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential output".into()));
    }
    Ok(e)
}

/// `log(1 - z) / z`, continuous through `z = 0`.
pub fn log1m_over(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        // -(1 + z/2 + z²/3 + z³/4 + z⁴/5)
        let mut acc = C64::new(0.0, 0.0);
        let mut pow = C64::new(1.0, 0.0);
        for m in 1..=8 {
            acc += pow / m as f64;
            pow *= z;
        }
        -acc
    } else {
        (C64::new(1.0, 0.0) - z).ln() / z
    }
}

/// `Tr log(1 - k)` for a matrix whose spectral radius is below one, using the
/// principal branch on every eigenvalue. The modulus comes from an LU
/// determinant and the branch of the argument from the eigenvalues.
pub fn trace_log_one_minus(k: &CMatrix) -> Result<C64> {
    let n = k.nrows();
    let one_minus = identity(n) - k;
    let det = one_minus.clone().lu().determinant();
    if det.norm() == 0.0 || !det.re.is_finite() || !det.im.is_finite() {
        return Err(Error::Singular { ratio: 0.0, threshold: DEFAULT_SINGULAR_THRESHOLD });
    }
    let eig = eigenvalues(k)?;
    let approx: C64 = eig.iter().map(|l| (C64::new(1.0, 0.0) - l).ln()).sum();
    let arg = det.arg();
    let turns = ((approx.im - arg) / std::f64::consts::TAU).round();
    Ok(C64::new(det.norm().ln(), arg + turns * std::f64::consts::TAU))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn spectrum_of_triangular_matrix() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[c64(1.0, 0.0), c64(2.0, 1.0), c64(0.5, 0.0), C64::default(), c64(-1.0, 2.0), c64(3.0, 0.0), C64::default(), C64::default(), c64(0.25, -1.0)],
        );
        let s = sort_spectrum(eigenvalues(&m).unwrap());
        let want = [c64(-1.0, 2.0), c64(0.25, -1.0), c64(1.0, 0.0)];
        assert!(spectrum_distance(&s, &want) < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = CMatrix::from_element(2, 2, c64(1.0, 0.0));
        assert!(matches!(inverse(&m), Err(Error::Singular { .. })));
    }

    #[test]
    fn trace_log_matches_eigen_sum() {
        let k = CMatrix::from_row_slice(2, 2, &[c64(0.1, 0.2), c64(0.3, 0.0), c64(-0.1, 0.05), c64(0.2, -0.1)]);
        let tl = trace_log_one_minus(&k).unwrap();
        let direct: C64 = eigenvalues(&k).unwrap().iter().map(|l| (c64(1.0, 0.0) - l).ln()).sum();
        assert!((tl - direct).norm() < 1e-13);
    }

    #[test]
    fn log1m_over_is_continuous_at_zero() {
        let small = c64(1e-5, -2e-5);
        let a = log1m_over(small);
        let b = (c64(1.0, 0.0) - small).ln() / small;
        assert!((a - b).norm() < 1e-10);
        assert!((log1m_over(C64::default()) + c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sort_collapses_ties() {
        let v = vec![c64(1.0, 2.0), c64(1.0 + 1e-14, -1.0), c64(0.0, 0.0)];
        let s = sort_spectrum(v);
        assert_eq!(s[0], c64(0.0, 0.0));
        assert_eq!(s[1].im, -1.0);
        assert_eq!(s[2].im, 2.0);
    }
}
