//! Time stepping for hierarchy flows and drift monitoring.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hierarchy::{
    casimir, flow_rhs, gen_y_rhs, generating_y, hamiltonian, lax_generator, y_to_mu, FlowForm, HamiltonianId,
    LaxVariable,
};
use crate::linalg;
use crate::polarized::{spectrum_shifted, BlockOperator, ExtendedPoint, REAL_FORM_TOLERANCE};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Integrator {
    /// Classical fourth-order Runge-Kutta.
    Rk4,
    /// `v ← exp(−dt B) v exp(dt B)` with the Lax generator `B` frozen at the
    /// start of the step.
    LieEulerConj,
}

impl Integrator {
    pub fn name(&self) -> &'static str {
        match self {
            Integrator::Rk4 => "RK4",
            Integrator::LieEulerConj => "LIE_EULER_CONJ",
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "RK4" => Ok(Integrator::Rk4),
            "LIE_EULER_CONJ" | "LIE_EULER" => Ok(Integrator::LieEulerConj),
            _ => Err(Error::InvalidFlow(format!("unknown integrator `{s}`"))),
        }
    }
}

/// What to integrate and how.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub id: HamiltonianId,
    pub form: FlowForm,
    /// Require the start point to lie in `iR ⊕ UL¹_res`.
    pub real_form: bool,
    pub integrator: Integrator,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
}

impl FlowSpec {
    pub fn new(id: HamiltonianId, form: FlowForm, integrator: Integrator, dt: f64, t_end: f64) -> Self {
        Self { id, form, real_form: false, integrator, dt, t_end, record_every: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        self.id.validate()?;
        if !self.id.supports(self.form) {
            return Err(Error::InvalidFlow(format!("{} is not available for {}", self.form, self.id)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidFlow(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidFlow(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.t_end > 0.0 && self.dt > self.t_end {
            return Err(Error::InvalidFlow(format!("dt = {} exceeds t_end = {}", self.dt, self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidFlow("record_every must be at least 1".into()));
        }
        if self.integrator == Integrator::LieEulerConj && matches!(self.form, FlowForm::PPlus | FlowForm::GenY) {
            return Err(Error::InvalidFlow(format!("{} is not a Lax form; use RK4", self.form)));
        }
        Ok(())
    }

    /// Number of steps and the step actually taken, `t_end / steps`.
    pub fn schedule(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, 0.0);
        }
        let steps = ((self.t_end / self.dt).round() as usize).max(1);
        (steps, self.t_end / steps as f64)
    }
}

fn check_finite(p: ExtendedPoint) -> Result<ExtendedPoint> {
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::NonFinite("state after step".into()))
    }
}

fn axpy(base: &BlockOperator, h: f64, dir: &BlockOperator) -> BlockOperator {
    base + &dir.scale_re(h)
}

fn rk4_combine(base: &BlockOperator, h: f64, k: [&BlockOperator; 4]) -> BlockOperator {
    let sum = &(&(k[0] + &k[1].scale_re(2.0)) + &k[2].scale_re(2.0)) + k[3];
    base + &sum.scale_re(h / 6.0)
}

/// One RK4 step of size `h`.
pub fn rk4_step_with(spec: &FlowSpec, p: &ExtendedPoint, h: f64) -> Result<ExtendedPoint> {
    if spec.form == FlowForm::GenY {
        let HamiltonianId::Generating { kappa, lambda } = spec.id else {
            return Err(Error::InvalidFlow(format!("GEN_Y_form needs a generating Hamiltonian, got {}", spec.id)));
        };
        let alpha = kappa * (lambda + 1.0) * p.gamma;
        let y = generating_y(kappa, lambda, p)?;
        let k1 = gen_y_rhs(alpha, &y);
        let k2 = gen_y_rhs(alpha, &axpy(&y, h / 2.0, &k1));
        let k3 = gen_y_rhs(alpha, &axpy(&y, h / 2.0, &k2));
        let k4 = gen_y_rhs(alpha, &axpy(&y, h, &k3));
        let y1 = rk4_combine(&y, h, [&k1, &k2, &k3, &k4]);
        return check_finite(ExtendedPoint::new(p.gamma, y_to_mu(kappa, lambda, p.gamma, &y1)?));
    }
    check_finite(ExtendedPoint::new(p.gamma, &p.mu + &rk4_increment(spec, p, h)?))
}

fn rk4_increment(spec: &FlowSpec, p: &ExtendedPoint, h: f64) -> Result<BlockOperator> {
    let f = |mu: &BlockOperator| flow_rhs(&spec.id, spec.form, &ExtendedPoint::new(p.gamma, mu.clone()));
    let k1 = f(&p.mu)?;
    let k2 = f(&axpy(&p.mu, h / 2.0, &k1))?;
    let k3 = f(&axpy(&p.mu, h / 2.0, &k2))?;
    let k4 = f(&axpy(&p.mu, h, &k3))?;
    Ok(rk4_combine(&BlockOperator::zeros(p.dims()), h, [&k1, &k2, &k3, &k4]))
}

/// Adds RK4 increments with Kahan compensation so that long runs at small
/// steps do not accumulate rounding in the state.
struct CompensatedRk4 {
    carry: BlockOperator,
}

impl CompensatedRk4 {
    fn step(&mut self, spec: &FlowSpec, p: &ExtendedPoint, h: f64) -> Result<ExtendedPoint> {
        let y = &rk4_increment(spec, p, h)? - &self.carry;
        let t = &p.mu + &y;
        self.carry = &(&t - &p.mu) - &y;
        check_finite(ExtendedPoint::new(p.gamma, t))
    }
}

/// One RK4 step of size `spec.dt`; `γ` is copied unchanged.
pub fn rk4_step(spec: &FlowSpec, p: &ExtendedPoint) -> Result<ExtendedPoint> {
    rk4_step_with(spec, p, spec.dt)
}

/// One conjugation step of size `h`.
pub fn lie_euler_conj_step_with(spec: &FlowSpec, p: &ExtendedPoint, h: f64) -> Result<ExtendedPoint> {
    let g = lax_generator(&spec.id, spec.form, p)?;
    let dims = p.dims();
    let hb = g.b.scale_re(h);
    let fwd = linalg::expm(hb.matrix())?;
    let back = linalg::expm(&(-hb.matrix()))?;
    let v = match g.variable {
        LaxVariable::Shifted => p.shifted(),
        LaxVariable::Mu => p.mu.clone(),
    };
    let v1 = BlockOperator::from_matrix(dims, back * v.matrix() * fwd)?;
    let mu = match g.variable {
        LaxVariable::Shifted => v1.add_p_plus(p.gamma),
        LaxVariable::Mu => v1,
    };
    check_finite(ExtendedPoint::new(p.gamma, mu))
}

/// One conjugation step of size `spec.dt`.
pub fn lie_euler_conj_step(spec: &FlowSpec, p: &ExtendedPoint) -> Result<ExtendedPoint> {
    lie_euler_conj_step_with(spec, p, spec.dt)
}

fn step_with(spec: &FlowSpec, p: &ExtendedPoint, h: f64) -> Result<ExtendedPoint> {
    match spec.integrator {
        Integrator::Rk4 => rk4_step_with(spec, p, h),
        Integrator::LieEulerConj => lie_euler_conj_step_with(spec, p, h),
    }
}

/// Recorded samples of a flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<ExtendedPoint>,
    /// Named scalar series aligned with `times`.
    pub observables: BTreeMap<String, Vec<C64>>,
    pub hamiltonian: Option<HamiltonianId>,
    /// Set when a step failed; the samples up to the failure are kept.
    pub aborted: Option<String>,
}

impl Trajectory {
    pub fn from_points(times: Vec<f64>, points: Vec<ExtendedPoint>) -> Self {
        Self { times, points, observables: BTreeMap::new(), hamiltonian: None, aborted: None }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&ExtendedPoint> {
        self.points.last()
    }

    /// Evaluates `f` on every sample and stores the series under `name`.
    pub fn add_observable<F>(&mut self, name: impl Into<String>, f: F)
    where
        F: Fn(&ExtendedPoint) -> C64,
    {
        let series = self.points.iter().map(f).collect();
        self.observables.insert(name.into(), series);
    }
}

/// Steps from `p0` to `spec.t_end`, recording every `record_every` steps and
/// the final state. Invalid specs are errors; a failing step ends the run
/// with [`Trajectory::aborted`] set.
pub fn integrate(spec: &FlowSpec, p0: &ExtendedPoint) -> Result<Trajectory> {
    spec.validate()?;
    if spec.real_form {
        let r = p0.real_form_residual();
        if r > REAL_FORM_TOLERANCE {
            return Err(Error::NotRealForm(r));
        }
    }
    let (steps, h) = spec.schedule();
    let mut traj = Trajectory::from_points(vec![0.0], vec![p0.clone()]);
    traj.hamiltonian = Some(spec.id);
    let mut p = p0.clone();
    let mut compensated =
        (spec.integrator == Integrator::Rk4 && spec.form != FlowForm::GenY).then(|| CompensatedRk4 { carry: BlockOperator::zeros(p0.dims()) });
    for i in 1..=steps {
        let next = match compensated.as_mut() {
            Some(c) => c.step(spec, &p, h),
            None => step_with(spec, &p, h),
        };
        match next {
            Ok(next) => p = next,
            Err(e) => {
                traj.aborted = Some(format!("step {i} at t = {}: {e}", (i - 1) as f64 * h));
                return Ok(traj);
            }
        }
        if i % spec.record_every == 0 || i == steps {
            traj.times.push(if i == steps { spec.t_end } else { i as f64 * h });
            traj.points.push(p.clone());
        }
    }
    Ok(traj)
}

/// Drift statistics of a trajectory relative to its first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    /// `(k, max_t |I^k(t) − I^k(0)|)`, Casimirs taken at `ε = 1`.
    pub casimir_drift: Vec<(usize, f64)>,
    /// Largest Frobenius change of `μ₊₊` or `μ₋₋`.
    pub diag_drift: f64,
    /// Largest matched eigenvalue displacement of `μ − γP₊`.
    pub spectrum_drift: f64,
    /// `max_t |h(t) − h(0)|` for the driving Hamiltonian, if known.
    pub hamiltonian_drift: Option<f64>,
    /// Largest distance from the real form along the trajectory.
    pub real_form_residual: f64,
}

pub fn monitor(traj: &Trajectory, ks: &[usize]) -> InvariantReport {
    let Some(p0) = traj.points.first() else {
        return InvariantReport {
            casimir_drift: ks.iter().map(|&k| (k, 0.0)).collect(),
            diag_drift: 0.0,
            spectrum_drift: 0.0,
            hamiltonian_drift: traj.hamiltonian.map(|_| 0.0),
            real_form_residual: 0.0,
        };
    };
    let casimir_drift = ks
        .iter()
        .map(|&k| {
            let c0 = casimir(k, p0, 1.0);
            let d = traj.points.iter().map(|p| (casimir(k, p, 1.0) - c0).norm()).fold(0.0, f64::max);
            (k, d)
        })
        .collect();
    let app0 = p0.mu.app();
    let amm0 = p0.mu.amm();
    let diag_drift = traj
        .points
        .iter()
        .map(|p| linalg::frobenius_norm(&(p.mu.app() - &app0)).max(linalg::frobenius_norm(&(p.mu.amm() - &amm0))))
        .fold(0.0, f64::max);
    let spectrum_drift = match spectrum_shifted(p0) {
        Ok(s0) => traj
            .points
            .iter()
            .map(|p| spectrum_shifted(p).map_or(f64::INFINITY, |s| linalg::spectrum_distance(&s, &s0)))
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let hamiltonian_drift = traj.hamiltonian.map(|id| match hamiltonian(&id, p0) {
        Ok(h0) => traj
            .points
            .iter()
            .map(|p| hamiltonian(&id, p).map_or(f64::INFINITY, |h| (h - h0).norm()))
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    });
    let real_form_residual = traj.points.iter().map(|p| p.real_form_residual()).fold(0.0, f64::max);
    InvariantReport { casimir_drift, diag_drift, spectrum_drift, hamiltonian_drift, real_form_residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::polarized::Dims;
    use crate::random::Sampler;

    fn dims() -> Dims {
        Dims::new(2, 2).unwrap()
    }

    #[test]
    fn zero_rhs_is_fixed_point() {
        let mut s = Sampler::seeded(71);
        let p = ExtendedPoint::new(s.complex(1.0), s.block_operator(dims(), 1.0).diagonal_part());
        let spec = FlowSpec::new(HamiltonianId::Wbasis { k: 2, n: 1 }, FlowForm::PPlus, Integrator::Rk4, 0.1, 1.0);
        let q = rk4_step(&spec, &p).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn gamma_is_copied_bitwise() {
        let mut s = Sampler::seeded(72);
        let p = s.point(dims(), 1.0, 0.5);
        for (integrator, form) in [(Integrator::Rk4, FlowForm::W), (Integrator::LieEulerConj, FlowForm::W)] {
            let spec = FlowSpec::new(HamiltonianId::Wbasis { k: 2, n: 1 }, form, integrator, 0.01, 1.0);
            let q = step_with(&spec, &p, 0.01).unwrap();
            assert_eq!(q.gamma.re.to_bits(), p.gamma.re.to_bits());
            assert_eq!(q.gamma.im.to_bits(), p.gamma.im.to_bits());
        }
    }

    #[test]
    fn t_end_zero_gives_single_point() {
        let mut s = Sampler::seeded(73);
        let p = s.point(dims(), 1.0, 0.5);
        let spec = FlowSpec::new(HamiltonianId::Hbasis { l: 1, n: 0 }, FlowForm::H, Integrator::Rk4, 0.01, 0.0);
        let t = integrate(&spec, &p).unwrap();
        assert_eq!(t.len(), 1);
        let r = monitor(&t, &[1, 2, 3]);
        assert!(r.casimir_drift.iter().all(|&(_, d)| d == 0.0));
        assert_eq!(r.diag_drift, 0.0);
        assert_eq!(r.spectrum_drift, 0.0);
        assert_eq!(r.hamiltonian_drift, Some(0.0));
    }

    #[test]
    fn lie_euler_identity_step_at_zero_mu() {
        let p = ExtendedPoint::new(c64(0.0, 0.0), BlockOperator::zeros(dims()));
        let spec = FlowSpec::new(HamiltonianId::Wbasis { k: 2, n: 0 }, FlowForm::W, Integrator::LieEulerConj, 0.1, 1.0);
        let q = lie_euler_conj_step(&spec, &p).unwrap();
        assert_eq!(q.mu.max_abs(), 0.0);
    }

    #[test]
    fn spec_validation() {
        let id = HamiltonianId::Wbasis { k: 2, n: 1 };
        assert!(FlowSpec::new(id, FlowForm::W, Integrator::Rk4, 0.0, 1.0).validate().is_err());
        assert!(FlowSpec::new(id, FlowForm::W, Integrator::Rk4, 2.0, 1.0).validate().is_err());
        assert!(FlowSpec::new(id, FlowForm::PPlus, Integrator::LieEulerConj, 0.1, 1.0).validate().is_err());
        let mut spec = FlowSpec::new(id, FlowForm::W, Integrator::Rk4, 0.1, 1.0);
        spec.record_every = 0;
        assert!(spec.validate().is_err());
        assert_eq!(FlowSpec::new(id, FlowForm::W, Integrator::Rk4, 0.3, 1.0).schedule(), (3, 1.0 / 3.0));
    }

    #[test]
    fn recording_keeps_endpoint() {
        let mut s = Sampler::seeded(74);
        let p = s.point(dims(), 1.0, 0.3);
        let mut spec = FlowSpec::new(HamiltonianId::Wbasis { k: 1, n: 1 }, FlowForm::W, Integrator::Rk4, 0.1, 1.0);
        spec.record_every = 3;
        let t = integrate(&spec, &p).unwrap();
        assert_eq!(t.times.len(), 5);
        assert_eq!(*t.times.last().unwrap(), 1.0);
    }

    #[test]
    fn failing_step_flags_partial_trajectory() {
        let mut s = Sampler::seeded(75);
        let p = s.point(dims(), 0.1, 0.1);
        let kappa = c64(2.0, 0.0);
        let spec = FlowSpec::new(HamiltonianId::Generating { kappa, lambda: c64(0.0, 0.0) }, FlowForm::W, Integrator::Rk4, 0.1, 1.0);
        // the start point already violates the radius condition
        let mut q = p.clone();
        q.mu = q.mu.scale_re(100.0);
        let t = integrate(&spec, &q).unwrap();
        assert!(t.aborted.is_some());
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn real_form_start_is_checked() {
        let mut s = Sampler::seeded(76);
        let p = s.point(dims(), 1.0, 1.0);
        let mut spec = FlowSpec::new(HamiltonianId::Hbasis { l: 1, n: 1 }, FlowForm::Real, Integrator::Rk4, 0.1, 1.0);
        spec.real_form = true;
        assert!(matches!(integrate(&spec, &p), Err(Error::NotRealForm(_))));
    }

    #[test]
    fn lie_euler_converges_to_rk4_at_first_order() {
        let mut s = Sampler::seeded(79);
        let p = s.point(dims(), 1.0, 0.4);
        let id = HamiltonianId::Wbasis { k: 2, n: 1 };
        let reference = integrate(&FlowSpec::new(id, FlowForm::W, Integrator::Rk4, 1e-3, 0.5), &p).unwrap();
        let err = |dt: f64| {
            let t = integrate(&FlowSpec::new(id, FlowForm::W, Integrator::LieEulerConj, dt, 0.5), &p).unwrap();
            (&t.last().unwrap().mu - &reference.last().unwrap().mu).frobenius_norm()
        };
        let (coarse, fine) = (err(1e-2), err(5e-3));
        assert!(coarse < 0.1, "{coarse}");
        assert!((coarse / fine - 2.0).abs() < 0.2, "{coarse} {fine}");
    }

    #[test]
    fn gen_y_and_w_form_agree() {
        let mut s = Sampler::seeded(77);
        let mut p = s.point(dims(), 0.5, 0.5);
        p.mu = p.mu.scale_re(0.3);
        let id = HamiltonianId::Generating { kappa: c64(0.2, 0.0), lambda: c64(0.4, 0.0) };
        let a = integrate(&FlowSpec::new(id, FlowForm::GenY, Integrator::Rk4, 1e-2, 0.5), &p).unwrap();
        let b = integrate(&FlowSpec::new(id, FlowForm::W, Integrator::Rk4, 1e-2, 0.5), &p).unwrap();
        assert!(a.aborted.is_none() && b.aborted.is_none());
        assert!((&a.last().unwrap().mu - &b.last().unwrap().mu).max_abs() < 1e-9);
    }

    #[test]
    fn observables_align_with_times() {
        let mut s = Sampler::seeded(78);
        let p = s.point(dims(), 1.0, 0.3);
        let spec = FlowSpec::new(HamiltonianId::Wbasis { k: 1, n: 0 }, FlowForm::W, Integrator::Rk4, 0.1, 0.5);
        let mut t = integrate(&spec, &p).unwrap();
        t.add_observable("tr", |q| q.mu.restricted_trace());
        assert_eq!(t.observables["tr"].len(), t.times.len());
    }
}
