use crate::error::{Error, Result};
use crate::polarized::{BlockOperator, Dims, ExtendedPoint};
use crate::{CMatrix, C64};

/// Real-form point of `dims(2,2)` with `γ = iχ` and
/// `μ = i[[diag(a₁,a₂), Z], [Z⁺, diag(d₁,d₂)]]`, `Z = [[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourDimState {
    pub chi: f64,
    pub a1: f64,
    pub a2: f64,
    pub d1: f64,
    pub d2: f64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

const STRUCTURE_TOLERANCE: f64 = 1e-9;

impl FourDimState {
    /// `a₁ ≠ a₂` and `d₁ ≠ d₂`.
    pub fn is_generic(&self) -> bool {
        self.a1 != self.a2 && self.d1 != self.d2
    }

    pub fn to_point(&self) -> ExtendedPoint {
        let i = C64::new(0.0, 1.0);
        let r = |x: f64| C64::new(x, 0.0);
        let m = CMatrix::from_row_slice(
            4,
            4,
            &[
                r(self.a1), C64::default(), self.a, self.b,
                C64::default(), r(self.a2), self.c, self.d,
                self.a.conj(), self.c.conj(), r(self.d1), C64::default(),
                self.b.conj(), self.d.conj(), C64::default(), r(self.d2),
            ],
        );
        let dims = Dims::new(2, 2).expect("valid dims");
        ExtendedPoint::new(C64::new(0.0, self.chi), BlockOperator::from_matrix(dims, m * i).expect("4×4"))
    }

    /// Reads the state back from a real-form point with diagonal `μ₊₊`, `μ₋₋`.
    pub fn from_point(p: &ExtendedPoint) -> Result<Self> {
        if p.dims() != Dims::new(2, 2)? {
            return Err(Error::DimensionMismatch { expected: Dims::new(2, 2)?, found: p.dims() });
        }
        let r = p.real_form_residual();
        if r > STRUCTURE_TOLERANCE {
            return Err(Error::NotRealForm(r));
        }
        let m = p.mu.matrix() * C64::new(0.0, -1.0);
        let off = [m[(0, 1)], m[(1, 0)], m[(2, 3)], m[(3, 2)]];
        if off.iter().any(|z| z.norm() > STRUCTURE_TOLERANCE) {
            return Err(Error::Domain("diagonal blocks of μ are not diagonal".into()));
        }
        Ok(Self {
            chi: p.gamma.im,
            a1: m[(0, 0)].re,
            a2: m[(1, 1)].re,
            d1: m[(2, 2)].re,
            d2: m[(3, 3)].re,
            a: m[(0, 2)],
            b: m[(0, 3)],
            c: m[(1, 2)],
            d: m[(1, 3)],
        })
    }

    /// Largest distance over the four complex amplitudes.
    pub fn distance(&self, other: &Self) -> f64 {
        [(self.a, other.a), (self.b, other.b), (self.c, other.c), (self.d, other.d)]
            .iter()
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// `(da, db, dc, dd)/dt` from `dZ/dt = iχ(A²Z + ZD² + AZD + ZZ⁺Z)`.
pub fn four_dim_rhs(s: &FourDimState) -> [C64; 4] {
    let i_chi = C64::new(0.0, s.chi);
    let (a, b, c, d) = (s.a, s.b, s.c, s.d);
    let (na, nb, nc, nd) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr(), d.norm_sqr());
    let k = |x: f64, y: f64| x * x + x * y + y * y;
    [
        i_chi * ((k(s.a1, s.d1) + na + nb + nc) * a + b * c * d.conj()),
        i_chi * ((k(s.a1, s.d2) + na + nb + nd) * b + a * c.conj() * d),
        i_chi * ((k(s.a2, s.d1) + na + nc + nd) * c + a * b.conj() * d),
        i_chi * ((k(s.a2, s.d2) + nb + nc + nd) * d + a.conj() * b * c),
    ]
}

/// Real polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial(self.0.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.0.is_empty() || other.0.is_empty() {
            return Polynomial(Vec::new());
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &x) in self.0.iter().enumerate() {
            for (j, &y) in other.0.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Polynomial(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.0.len().max(other.0.len());
        Polynomial((0..n).map(|i| self.0.get(i).unwrap_or(&0.0) + other.0.get(i).unwrap_or(&0.0)).collect())
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial(self.0.iter().map(|x| x * c).collect())
    }
}

/// Conserved moduli, `Δ`, the current `x = |a|²` and the polynomials governing
/// `x(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourDimInvariants {
    pub p2: f64,
    pub q2: f64,
    pub r2: f64,
    pub s2: f64,
    pub delta: f64,
    pub x: f64,
    /// `a b̄ c̄ d`.
    pub q: C64,
    /// `v(x) = 2 Re(a b̄ c̄ d)` written through the conserved quantities.
    pub v: Polynomial,
    /// `w(x) = χ²(4x(p²−x)(q²−x)(r²−q²+x) − v(x)²) = (dx/dt)²`.
    pub w: Polynomial,
}

pub fn four_dim_invariants(s: &FourDimState) -> FourDimInvariants {
    let (na, nb, nc, nd) = (s.a.norm_sqr(), s.b.norm_sqr(), s.c.norm_sqr(), s.d.norm_sqr());
    let p2 = na + nb;
    let q2 = na + nc;
    let r2 = nc + nd;
    let s2 = nb + nd;
    let q = s.a * s.b.conj() * s.c.conj() * s.d;
    let delta = na * s.a1 * s.d1 + nb * s.a1 * s.d2 + nc * s.a2 * s.d1 + nd * s.a2 * s.d2 + na * nc + nb * nd + 2.0 * q.re;
    let v0 = delta - p2 * s.a1 * s.d2 - q2 * s.a2 * s.d1 - (r2 - q2) * s.a2 * s.d2 - p2 * (r2 - q2);
    let v1 = -((s.a1 - s.a2) * (s.d1 - s.d2) + p2 + 2.0 * q2 - r2);
    let v = Polynomial(vec![v0, v1, 2.0]);
    let quartic = Polynomial(vec![0.0, 4.0])
        .mul(&Polynomial(vec![p2, -1.0]))
        .mul(&Polynomial(vec![q2, -1.0]))
        .mul(&Polynomial(vec![r2 - q2, 1.0]));
    let w = quartic.add(&v.mul(&v).scale(-1.0)).scale(s.chi * s.chi);
    FourDimInvariants { p2, q2, r2, s2, delta, x: na, q, v, w }
}

const EVOLVE_STEP: f64 = 1e-3;

struct Reduced<'a> {
    chi: f64,
    s: &'a FourDimState,
    inv: &'a FourDimInvariants,
    dw: Polynomial,
}

impl Reduced<'_> {
    // state: x, x', α, β, γ, δ
    fn rhs(&self, y: &[f64; 6]) -> [f64; 6] {
        let (s, inv, chi) = (self.s, self.inv, self.chi);
        let x = y[0];
        let v = inv.v.eval(x);
        let k = |p: f64, q: f64| p * p + p * q + q * q;
        [
            y[1],
            self.dw.eval(x) / 2.0,
            chi * (k(s.a1, s.d1) + inv.p2 + inv.q2 - x + v / (2.0 * x)),
            chi * (k(s.a1, s.d2) + inv.p2 + inv.r2 - inv.q2 + x + v / (2.0 * (inv.p2 - x))),
            chi * (k(s.a2, s.d1) + inv.r2 + x + v / (2.0 * (inv.q2 - x))),
            chi * (k(s.a2, s.d2) + inv.p2 + inv.r2 - x + v / (2.0 * (inv.r2 - inv.q2 + x))),
        ]
    }

    fn rk4(&self, y: &[f64; 6], h: f64) -> [f64; 6] {
        let add = |a: &[f64; 6], b: &[f64; 6], c: f64| std::array::from_fn(|i| a[i] + c * b[i]);
        let k1 = self.rhs(y);
        let k2 = self.rhs(&add(y, &k1, h / 2.0));
        let k3 = self.rhs(&add(y, &k2, h / 2.0));
        let k4 = self.rhs(&add(y, &k3, h));
        std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    }
}

/// Evolves a generic state for time `t` through the reduced system:
/// `x'' = w'(x)/2` with `x'(0) = 2χ Im(a b̄ c̄ d)`, the four phase equations,
/// and reconstruction of `a, b, c, d` from the conserved moduli.
pub fn four_dim_evolve(s0: &FourDimState, t: f64) -> Result<FourDimState> {
    if t == 0.0 {
        return Ok(*s0);
    }
    if !s0.is_generic() {
        return Err(Error::Domain("four-dimensional reduction needs a₁ ≠ a₂ and d₁ ≠ d₂".into()));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time".into()));
    }
    let inv = four_dim_invariants(s0);
    let scale = 1.0 + inv.w.0.iter().map(|c| c.abs()).fold(0.0, f64::max);
    if inv.w.eval(inv.x) < -1e-12 * scale {
        return Err(Error::Domain("w(x₀) < 0".into()));
    }
    let moduli = [s0.a, s0.b, s0.c, s0.d];
    if moduli.iter().any(|z| z.norm() < 1e-12) {
        return Err(Error::Domain("a vanishing amplitude leaves its phase undefined".into()));
    }
    let red = Reduced { chi: s0.chi, s: s0, inv: &inv, dw: inv.w.derivative() };
    let mut y = [inv.x, 2.0 * s0.chi * inv.q.im, s0.a.arg(), s0.b.arg(), s0.c.arg(), s0.d.arg()];
    let steps = (t.abs() / EVOLVE_STEP).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    for _ in 0..steps {
        y = red.rk4(&y, h);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("reduced four-dimensional state".into()));
        }
    }
    let x = y[0];
    let m = [x, inv.p2 - x, inv.q2 - x, inv.r2 - inv.q2 + x].map(|v| v.max(0.0).sqrt());
    Ok(FourDimState {
        a: C64::from_polar(m[0], y[2]),
        b: C64::from_polar(m[1], y[3]),
        c: C64::from_polar(m[2], y[4]),
        d: C64::from_polar(m[3], y[5]),
        ..*s0
    })
}

/// Time between the first two maxima of `x(t)`, searched up to `t_max`.
pub fn four_dim_quasi_period(s0: &FourDimState, t_max: f64) -> Option<f64> {
    let inv = four_dim_invariants(s0);
    let dw = inv.w.derivative();
    let f = |y: [f64; 2]| [y[1], dw.eval(y[0]) / 2.0];
    let mut y = [inv.x, 2.0 * s0.chi * inv.q.im];
    let h = EVOLVE_STEP;
    let mut t = 0.0;
    let mut maxima = Vec::new();
    while t < t_max && maxima.len() < 2 {
        let k1 = f(y);
        let k2 = f([y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f([y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if y[1] > 0.0 && next[1] <= 0.0 {
            maxima.push(t + h * y[1] / (y[1] - next[1]));
        }
        y = next;
        t += h;
    }
    (maxima.len() == 2).then(|| maxima[1] - maxima[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::hierarchy::{flow_rhs, FlowForm, HamiltonianId};

    fn sample() -> FourDimState {
        FourDimState {
            chi: 0.8,
            a1: 0.3,
            a2: -0.5,
            d1: 0.7,
            d2: -0.2,
            a: c64(0.4, 0.3),
            b: c64(-0.2, 0.5),
            c: c64(0.6, -0.1),
            d: c64(0.1, 0.35),
        }
    }

    #[test]
    fn point_round_trip() {
        let s = sample();
        let p = s.to_point();
        assert!(p.real_form_residual() < 1e-15);
        assert_eq!(FourDimState::from_point(&p).unwrap(), s);
    }

    #[test]
    fn zero_amplitudes() {
        let s = FourDimState { a: C64::default(), b: C64::default(), c: C64::default(), d: C64::default(), ..sample() };
        let inv = four_dim_invariants(&s);
        assert_eq!((inv.p2, inv.q2, inv.r2, inv.s2, inv.delta), (0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn moduli_identity() {
        let inv = four_dim_invariants(&sample());
        assert!((inv.p2 + inv.r2 - inv.q2 - inv.s2).abs() < 1e-15);
    }

    #[test]
    fn explicit_rhs_matches_riccati_flow() {
        let s = sample();
        let p = s.to_point();
        let r = flow_rhs(&HamiltonianId::Hbasis { l: 3, n: 0 }, FlowForm::Real, &p).unwrap();
        // μ₊₋ = iZ
        let dz = r.apm() * C64::new(0.0, -1.0);
        let got = four_dim_rhs(&s);
        let want = [dz[(0, 0)], dz[(0, 1)], dz[(1, 0)], dz[(1, 1)]];
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).norm() < 1e-14);
        }
        assert!(r.app().iter().chain(r.amm().iter()).all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn v_and_w_describe_the_state() {
        let s = sample();
        let inv = four_dim_invariants(&s);
        assert!((inv.v.eval(inv.x) - 2.0 * inv.q.re).abs() < 1e-14);
        let dx = 2.0 * s.chi * inv.q.im;
        assert!((inv.w.eval(inv.x) - dx * dx).abs() < 1e-14);
    }

    #[test]
    fn phase_equations_match_rhs() {
        let s = sample();
        let inv = four_dim_invariants(&s);
        let red = Reduced { chi: s.chi, s: &s, inv: &inv, dw: inv.w.derivative() };
        let y = [inv.x, 0.0, 0.0, 0.0, 0.0, 0.0];
        let r = red.rhs(&y);
        let amps = [s.a, s.b, s.c, s.d];
        let d = four_dim_rhs(&s);
        for i in 0..4 {
            let want = (d[i] / amps[i]).im;
            assert!((r[2 + i] - want).abs() < 1e-13, "phase {i}");
        }
    }

    #[test]
    fn evolve_edge_cases() {
        let s = sample();
        assert_eq!(four_dim_evolve(&s, 0.0).unwrap(), s);
        let degenerate = FourDimState { a2: s.a1, ..s };
        assert!(four_dim_evolve(&degenerate, 1.0).is_err());
        let e = four_dim_evolve(&s, 0.7).unwrap();
        let (i0, i1) = (four_dim_invariants(&s), four_dim_invariants(&e));
        assert!((i0.p2 - i1.p2).abs() < 1e-14 && (i0.q2 - i1.q2).abs() < 1e-14 && (i0.r2 - i1.r2).abs() < 1e-14);
    }

    #[test]
    fn polynomial_helpers() {
        let p = Polynomial(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative(), Polynomial(vec![-2.0, 6.0]));
        assert_eq!(p.mul(&Polynomial(vec![0.0, 1.0])), Polynomial(vec![0.0, 1.0, -2.0, 3.0]));
    }

    #[test]
    fn quasi_period_exists() {
        let t = four_dim_quasi_period(&sample(), 200.0).unwrap();
        assert!(t > 0.0);
    }
}
