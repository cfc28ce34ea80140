//! `verify`: named property suites with residuals against tolerances.

use std::collections::BTreeMap;

use grhier::extension::{
    adjoint_derivative_fd, central_adjoint, cocycle_residuals, det_omega_mixed_derivative_fd, extended_adjoint,
    extended_bracket, extended_coadjoint, extended_pairing, omega_condition_residual, phi_condition_residual,
    ExtendedAlgebraElement, ExtendedCoalgebraElement, LocalGroupElement, MIXED_FD_STEP,
};
use grhier::hierarchy::{
    casimir, casimir_gradient, flow_rhs, generating_hamiltonian, generating_series, h_table, hamiltonian,
    hamiltonian_gradient, p_coeff, tau_reparametrization_check, w_table, w_table_right, Hamiltonian,
};
use grhier::integrators::{integrate, FlowSpec, Integrator};
use grhier::lie_poisson::{
    central_bracket, group_coad, numeric_gradient, pencil_parts, poisson_bracket, schwinger, LinearFunctional,
    DEFAULT_FD_STEP,
};
use grhier::linalg;
use grhier::oracles::{
    four_dim_evolve, four_dim_invariants, four_dim_quasi_period, grassmann_embed, grassmann_zz_invariance,
    product_identity_residual, vector_case_solution, FourDimState, VectorCaseState,
};
use grhier::polarized::{pairing, restricted_trace};
use grhier::random::Sampler;
use grhier::{AlgebraElement, BlockOperator, Dims, ExtendedPoint, FlowForm, HamiltonianId, C64};
use serde::Serialize;

use crate::exit::CliError;

pub const SUITES: [&str; 6] = ["core", "poisson", "hierarchy", "oracles", "extension", "magri"];

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Environment {
    pub dims: [usize; 2],
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerifyReport {
    pub suite: String,
    pub environment: Environment,
    pub checks: Vec<Check>,
    pub pass: bool,
}

struct Ctx {
    dims: Dims,
    sampler: Sampler,
    checks: Vec<Check>,
}

type R<T> = grhier::Result<T>;

impl Ctx {
    fn record(&mut self, name: &str, tolerance: f64, residual: R<f64>) {
        // a failed computation counts as an infinite residual
        let residual = residual.unwrap_or(f64::INFINITY);
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.checks.push(Check { name: name.to_string(), residual, tolerance, pass: residual <= tolerance });
    }

    fn op(&mut self, scale: f64) -> BlockOperator {
        self.sampler.block_operator(self.dims, scale)
    }

    fn point(&mut self, scale: f64) -> ExtendedPoint {
        self.sampler.point(self.dims, 1.0, scale)
    }
}

fn max_over<F: FnMut() -> R<f64>>(n: usize, mut f: F) -> R<f64> {
    let mut worst = 0.0f64;
    for _ in 0..n {
        worst = worst.max(f()?);
    }
    Ok(worst)
}

fn core(c: &mut Ctx) {
    let r = max_over(20, || {
        let (a, b) = (c.op(1.0), c.op(1.0));
        Ok((restricted_trace(&(&a * &b)) - restricted_trace(&(&b * &a))).norm())
    });
    c.record("trace_cyclicity", 1e-12, r);
    let r = max_over(20, || {
        let (a, b) = (c.op(1.0), c.op(1.0));
        Ok(((&a * &b).star_norm() - a.star_norm() * b.star_norm()).max(0.0))
    });
    c.record("star_norm_submultiplicative", 1e-12, r);
    let r = max_over(20, || {
        let (mu, x) = (c.op(1.0), c.op(1.0));
        let a = c.sampler.near_identity(c.dims, 0.3);
        let a_inv = BlockOperator::from_matrix(c.dims, linalg::inverse(a.matrix())?)?;
        let lhs = pairing(&(&(&a_inv * &mu) * &a), &(&(&a_inv * &x) * &a))?;
        Ok((lhs - pairing(&mu, &x)?).norm())
    });
    c.record("pairing_conjugation_invariance", 1e-10, r);
    let r = max_over(20, || {
        let a = c.op(1.0);
        let b = BlockOperator::from_blocks(c.dims, &a.app(), &a.apm(), &a.amp(), &a.amm())?;
        Ok((&a - &b).max_abs())
    });
    c.record("block_round_trip", 0.0, r);
    let r = max_over(20, || {
        let (mu, x) = (c.op(1.0), c.op(1.0));
        Ok((pairing(&mu, &x)? - restricted_trace(&(&mu * &x))).norm())
    });
    c.record("pairing_is_trace_of_product", 1e-12, r);
}

fn poisson(c: &mut Ctx) {
    let r = max_over(20, || {
        let (x, y) = (c.op(1.0), c.op(1.0));
        Ok((schwinger(&x, &y)? + schwinger(&y, &x)?).norm())
    });
    c.record("schwinger_antisymmetry", 1e-13, r);
    let r = max_over(20, || {
        let (x, y, z) = (c.op(1.0), c.op(1.0), c.op(1.0));
        Ok((schwinger(&x.commutator(&y), &z)? + schwinger(&y.commutator(&z), &x)? + schwinger(&z.commutator(&x), &y)?)
            .norm())
    });
    c.record("schwinger_cocycle", 1e-12, r);
    let r = max_over(20, || {
        let u = AlgebraElement::new(c.sampler.complex(1.0), c.op(1.0));
        let v = AlgebraElement::new(c.sampler.complex(1.0), c.op(1.0));
        let w = AlgebraElement::new(c.sampler.complex(1.0), c.op(1.0));
        let j = |p: &AlgebraElement, q: &AlgebraElement, r: &AlgebraElement| central_bracket(p, &central_bracket(q, r)?);
        let (t1, t2, t3) = (j(&u, &v, &w)?, j(&v, &w, &u)?, j(&w, &u, &v)?);
        Ok((t1.lambda + t2.lambda + t3.lambda).norm().max((&(&t1.x + &t2.x) + &t3.x).max_abs()))
    });
    c.record("central_bracket_jacobi", 1e-11, r);
    let r = max_over(20, || {
        let p = c.point(0.5);
        let a = c.sampler.near_identity(c.dims, 0.2);
        let q = group_coad(&a, &p)?;
        Ok((1..=5).map(|k| (casimir(k, &q, 1.0) - casimir(k, &p, 1.0)).norm()).fold(0.0, f64::max))
    });
    c.record("casimir_coadjoint_invariance", 1e-9, r);
    let r = max_over(3, || {
        let p = c.point(0.5);
        let mut worst = 0.0f64;
        for id in [HamiltonianId::Wbasis { k: 3, n: 1 }, HamiltonianId::Wbasis { k: 2, n: 2 }, HamiltonianId::Hbasis { l: 2, n: 1 }] {
            let fd = numeric_gradient(|q| hamiltonian(&id, q), &p, DEFAULT_FD_STEP)?;
            let an = hamiltonian_gradient(&id, &p)?;
            worst = worst.max((&fd.d_mu - &an.d_mu).max_abs()).max((fd.d_gamma - an.d_gamma).norm());
        }
        Ok(worst)
    });
    c.record("hamiltonian_gradient_finite_differences", 1e-6, r);
    let r = max_over(5, || {
        let p = c.point(0.5);
        let eps = c.sampler.uniform();
        let mut worst = 0.0f64;
        for k in 1..=4 {
            let g = move |q: &ExtendedPoint| -> R<grhier::Gradient> {
                Ok(grhier::Gradient { d_gamma: C64::default(), d_mu: casimir_gradient(k, q, eps) })
            };
            let f = LinearFunctional { c: c.sampler.complex(1.0), x: c.op(1.0) };
            worst = worst.max(poisson_bracket(&g, &f, &p, eps)?.norm());
        }
        Ok(worst)
    });
    c.record("casimirs_are_central", 1e-10, r);
}

fn hierarchy(c: &mut Ctx) {
    let r = max_over(20, || {
        let mu = c.op(1.0);
        let w = w_table(8, &mu);
        let h = h_table(7, &mu);
        let norm = mu.frobenius_norm();
        let mut worst = 0.0f64;
        for k in 1..=8 {
            for l in 0..k {
                let mut comb = BlockOperator::zeros(c.dims);
                for n in 1..=l + 1 {
                    let coeff = p_coeff(l, n, k as i64).max(0);
                    if coeff != 0 {
                        comb = &comb + &h[l][n].scale_re(coeff as f64);
                    }
                }
                worst = worst.max((&w[k][k - l] - &comb).frobenius_norm() / norm.powi(l as i32));
            }
        }
        Ok(worst)
    });
    c.record("w_h_expansion_k_le_8", 1e-9, r);
    let r = max_over(20, || {
        let mu = c.op(0.3);
        let pp = BlockOperator::p_plus(c.dims);
        let w = w_table(8, &mu);
        let mut worst = 0.0f64;
        for k in 1..=8 {
            for n in 1..=k {
                worst = worst.max((&mu.commutator(&w[k][n]) + &pp.commutator(&w[k][n - 1])).frobenius_norm());
            }
        }
        Ok(worst)
    });
    c.record("w_commutation", 1e-10, r);
    let r = max_over(20, || {
        let mu = c.op(0.5);
        let (a, b) = (w_table(8, &mu), w_table_right(8, &mu));
        Ok(a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).max_abs()).fold(0.0, f64::max))
    });
    c.record("w_left_right_recurrences", 1e-11, r);
    let r = max_over(20, || {
        let p = c.point(0.3);
        let mut worst = 0.0f64;
        for k in 1..=5 {
            for n in 0..=k {
                let id = HamiltonianId::Wbasis { k, n };
                let a = flow_rhs(&id, FlowForm::W, &p)?;
                worst = worst
                    .max((&a - &flow_rhs(&id, FlowForm::Mu, &p)?).frobenius_norm())
                    .max((&a - &flow_rhs(&id, FlowForm::PPlus, &p)?).frobenius_norm());
            }
        }
        Ok(worst)
    });
    c.record("flow_forms_agree", 1e-10, r);
    let r = max_over(10, || {
        let p = c.point(1.0);
        let mut worst = 0.0f64;
        for k in 1..=5 {
            for n in 0..=k {
                worst = worst.max(flow_rhs(&HamiltonianId::Wbasis { k, n }, FlowForm::PPlus, &p)?.diagonal_part().max_abs());
            }
        }
        Ok(worst)
    });
    c.record("pplus_form_diagonal_blocks", 0.0, r);
    let r = max_over(5, || {
        let p = c.point(0.8);
        let mut worst = 0.0f64;
        for k in 1..=6 {
            for l in 0..k {
                let t = tau_reparametrization_check(l, k, &p)?;
                worst = worst.max(t.residual / (1.0 + t.expected.norm()));
            }
        }
        Ok(worst)
    });
    c.record("tau_prefactor_minus_k_plus_one", 1e-10, r);
    let r = max_over(10, || {
        let p = c.point(0.3);
        let lambda = c.sampler.complex(0.5);
        let bound = p.mu.star_norm() + (lambda * p.gamma).norm();
        let kappa = C64::from_polar(0.5 / bound, c.sampler.real(3.0));
        let closed = generating_hamiltonian(kappa, lambda, &p)?;
        let series = generating_series(kappa, lambda, &p, 60)?;
        Ok((closed - series.value).norm() / closed.norm().max(f64::MIN_POSITIVE))
    });
    c.record("generating_closed_form_vs_series", 1e-8, r);
}

fn oracles(c: &mut Ctx) {
    let vdims = Dims::new(1, 4).expect("dims");
    let r = max_over(3, || {
        let p = c.sampler.point(vdims, 1.0, 0.5);
        let spec = FlowSpec::new(HamiltonianId::Hbasis { l: 2, n: 0 }, FlowForm::H, Integrator::Rk4, 1e-3, 1.0);
        let traj = integrate(&spec, &p)?;
        let st0 = VectorCaseState::from_operator(&p.mu)?;
        let mut worst = 0.0f64;
        for (t, q) in traj.times.iter().zip(traj.points.iter()).step_by(100) {
            let oracle = vector_case_solution(&st0, p.gamma, &BTreeMap::from([(2, *t)]))?;
            worst = worst.max(VectorCaseState::from_operator(&q.mu)?.distance(&oracle));
        }
        Ok(worst)
    });
    c.record("vector_case_closed_form", 1e-6, r);
    let r = max_over(3, || {
        let p = c.sampler.point(vdims, 1.0, 0.5);
        product_identity_residual(&p, &[2, 3, 4])
    });
    c.record("vector_case_product_identity", 1e-10, r);

    let s0 = FourDimState {
        chi: 0.8,
        a1: 0.3,
        a2: -0.5,
        d1: 0.7,
        d2: -0.2,
        a: C64::new(0.4, 0.3),
        b: C64::new(-0.2, 0.5),
        c: C64::new(0.6, -0.1),
        d: C64::new(0.1, 0.35),
    };
    let period = four_dim_quasi_period(&s0, 200.0);
    let traj = period.map(|t| {
        let steps = (t / 1e-3).ceil();
        let mut spec = FlowSpec::new(HamiltonianId::Hbasis { l: 3, n: 0 }, FlowForm::Real, Integrator::Rk4, t / steps, t);
        spec.real_form = true;
        integrate(&spec, &s0.to_point())
    });
    let moduli = match &traj {
        Some(Ok(tr)) => (|| {
            let i0 = four_dim_invariants(&s0);
            let mut worst = 0.0f64;
            for p in &tr.points {
                let i = four_dim_invariants(&FourDimState::from_point(p)?);
                for (a, b) in [(i.p2, i0.p2), (i.q2, i0.q2), (i.r2, i0.r2), (i.s2, i0.s2), (i.delta, i0.delta)] {
                    worst = worst.max((a - b).abs());
                }
            }
            Ok(worst)
        })(),
        _ => Ok(f64::INFINITY),
    };
    c.record("four_dim_moduli", 1e-8, moduli);
    let reduction = match (&traj, period) {
        (Some(Ok(tr)), Some(t)) => (|| {
            let last = FourDimState::from_point(tr.last().expect("nonempty"))?;
            Ok(four_dim_evolve(&s0, t)?.distance(&last))
        })(),
        _ => Ok(f64::INFINITY),
    };
    c.record("four_dim_reduction_one_period", 1e-5, reduction);

    let r = max_over(2, || {
        let basis = c.sampler.cmatrix(c.dims.total(), c.dims.n_plus, 1.0);
        let p = grassmann_embed(C64::new(0.0, 0.8), &basis, c.dims)?;
        let mut spec = FlowSpec::new(HamiltonianId::Hbasis { l: 2, n: 1 }, FlowForm::Real, Integrator::Rk4, 1e-3, 1.0);
        spec.real_form = true;
        grassmann_zz_invariance(&integrate(&spec, &p)?)
    });
    c.record("grassmann_zz_spectrum", 1e-8, r);
}

fn extension(c: &mut Ctx) {
    let d = c.dims;
    let np = d.n_plus;
    let element = |c: &mut Ctx| ExtendedAlgebraElement { rho: c.sampler.cmatrix(np, np, 1.0), x: c.op(1.0) };
    let group = |c: &mut Ctx| LocalGroupElement { n: c.sampler.near_identity_matrix(np, 0.1), a: c.sampler.near_identity(d, 0.1) };
    let r = max_over(10, || {
        let (a1, a2, a3) = (c.sampler.near_identity(d, 0.1), c.sampler.near_identity(d, 0.1), c.sampler.near_identity(d, 0.1));
        let n = c.sampler.near_identity_matrix(np, 0.1);
        Ok(cocycle_residuals(&a1, &a2, &a3, &n)?.max())
    });
    c.record("group_extension_conditions", 1e-10, r);
    let r = max_over(5, || {
        let (x, y) = (c.op(1.0), c.op(1.0));
        Ok((det_omega_mixed_derivative_fd(&x, &y, MIXED_FD_STEP)? + schwinger(&x, &y)?).norm())
    });
    c.record("det_omega_mixed_derivative_is_minus_schwinger", 1e-5, r);
    let r = max_over(5, || {
        let (dir, e) = (element(c), element(c));
        let got = adjoint_derivative_fd(&dir, &e, 1e-5)?;
        let want = extended_bracket(&dir, &e)?;
        Ok(linalg::frobenius_norm(&(&got.rho - &want.rho)).max((&got.x - &want.x).max_abs()))
    });
    c.record("adjoint_derivative_is_bracket", 1e-5, r);
    let r = max_over(10, || {
        let (a, b, e) = (element(c), element(c), element(c));
        let j = |p: &ExtendedAlgebraElement, q: &ExtendedAlgebraElement, r: &ExtendedAlgebraElement| {
            extended_bracket(p, &extended_bracket(q, r)?)
        };
        let (t1, t2, t3) = (j(&a, &b, &e)?, j(&b, &e, &a)?, j(&e, &a, &b)?);
        Ok(linalg::frobenius_norm(&(&t1.rho + &t2.rho + &t3.rho)).max((&(&t1.x + &t2.x) + &t3.x).max_abs()))
    });
    c.record("extended_bracket_jacobi", 1e-11, r);
    let r = max_over(10, || {
        let (x, y, z) = (c.op(1.0), c.op(1.0), c.op(1.0));
        let rho = c.sampler.cmatrix(np, np, 1.0);
        Ok(omega_condition_residual(&x, &y, &z)?.max(phi_condition_residual(&x, &y, &rho)?))
    });
    c.record("infinitesimal_conditions", 1e-11, r);
    let r = max_over(10, || {
        let (g1, g2) = (group(c), group(c));
        let e = element(c);
        let lhs = extended_adjoint(&grhier::extension::group_product(&g1, &g2)?, &e)?;
        let rhs = extended_adjoint(&g1, &extended_adjoint(&g2, &e)?)?;
        Ok(linalg::frobenius_norm(&(&lhs.rho - &rhs.rho)).max((&lhs.x - &rhs.x).max_abs()))
    });
    c.record("adjoint_homomorphism", 1e-8, r);
    let r = max_over(10, || {
        let g = group(c);
        let e = element(c);
        let m = ExtendedCoalgebraElement { tau: c.sampler.cmatrix(np, np, 1.0), mu: c.op(1.0) };
        Ok((extended_pairing(&extended_coadjoint(&g, &m)?, &e)? - extended_pairing(&m, &extended_adjoint(&g, &e)?)?).norm())
    });
    c.record("coadjoint_duality", 1e-9, r);
    let r = max_over(10, || {
        let g = group(c);
        let e = element(c);
        let full = extended_adjoint(&g, &e)?;
        let central = central_adjoint(&g.a, &AlgebraElement::new(e.rho.trace(), e.x.clone()))?;
        Ok((full.rho.trace() - central.lambda).norm().max((&full.x - &central.x).max_abs()))
    });
    c.record("central_quotient_by_trace", 1e-8, r);
}

fn magri(c: &mut Ctx) {
    let r = max_over(10, || {
        let p = c.point(0.5);
        let x = c.op(1.0);
        let mut worst = 0.0f64;
        for k in 1..=5 {
            for n in 0..k {
                let lower = hamiltonian_gradient(&HamiltonianId::Wbasis { k, n }, &p)?.d_mu;
                let upper = hamiltonian_gradient(&HamiltonianId::Wbasis { k, n: n + 1 }, &p)?.d_mu;
                worst = worst.max((pencil_parts(&upper, &x, &p)?.0 - pencil_parts(&lower, &x, &p)?.1).norm());
            }
        }
        Ok(worst)
    });
    c.record("magri_chain_k_le_5", 1e-9, r);
    let ids: Vec<Hamiltonian> =
        (1..=5).flat_map(|k| (0..=k).map(move |n| Hamiltonian(HamiltonianId::Wbasis { k, n }))).collect();
    let r = max_over(5, || {
        let p = c.point(0.4);
        let mut worst = 0.0f64;
        for eps in [0.0, 0.5, 1.0] {
            for a in &ids {
                for b in &ids {
                    worst = worst.max(poisson_bracket(a, b, &p, eps)?.norm());
                }
            }
        }
        Ok(worst)
    });
    c.record("involution_k_l_le_5", 1e-10, r);
    let r = max_over(5, || {
        let p = c.point(0.3);
        let (l1, l2) = (c.sampler.complex(0.5), c.sampler.complex(0.5));
        let k1 = 0.5 / (p.mu.star_norm() + (l1 * p.gamma).norm());
        let k2 = 0.3 / (p.mu.star_norm() + (l2 * p.gamma).norm());
        let f = Hamiltonian(HamiltonianId::Generating { kappa: C64::new(k1, 0.0), lambda: l1 });
        let g = Hamiltonian(HamiltonianId::Generating { kappa: C64::new(0.0, k2), lambda: l2 });
        Ok(poisson_bracket(&f, &g, &p, 1.0)?.norm())
    });
    c.record("generating_involution", 1e-8, r);
}

pub fn run_suite(suite: &str, seed: u64) -> Result<VerifyReport, CliError> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(CliError::parse(format!("unknown suite `{s}` (expected one of {}, all)", SUITES.join(", ")))),
    };
    let dims = Dims::new(2, 3).expect("dims");
    let mut ctx = Ctx { dims, sampler: Sampler::seeded(seed), checks: Vec::new() };
    for name in names {
        match name {
            "core" => core(&mut ctx),
            "poisson" => poisson(&mut ctx),
            "hierarchy" => hierarchy(&mut ctx),
            "oracles" => oracles(&mut ctx),
            "extension" => extension(&mut ctx),
            _ => magri(&mut ctx),
        }
    }
    let pass = ctx.checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        suite: suite.to_string(),
        environment: Environment { dims: [dims.n_plus, dims.n_minus], seed },
        checks: ctx.checks,
        pass,
    })
}
