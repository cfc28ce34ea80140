//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use grhier::extension::{
    adjoint_derivative_fd, cocycle_residuals, det_omega_mixed_derivative_fd, extended_bracket, ExtendedAlgebraElement,
    MIXED_FD_STEP,
};
use grhier::hierarchy::{
    casimir, flow_rhs, generating_hamiltonian, generating_series, h_table, hamiltonian_gradient, p_coeff, w_table,
    Hamiltonian,
};
use grhier::integrators::{integrate, monitor, FlowSpec, Integrator, Trajectory};
use grhier::lie_poisson::{group_coad, pencil_parts, poisson_bracket, schwinger};
use grhier::oracles::{
    four_dim_evolve, four_dim_invariants, four_dim_quasi_period, grassmann_embed, grassmann_zz_invariance,
    vector_case_solution, FourDimState, VectorCaseState,
};
use grhier::random::Sampler;
use grhier::{BlockOperator, Dims, ExtendedPoint, FlowForm, HamiltonianId, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dims(p: usize, m: usize) -> Dims {
    Dims::new(p, m).unwrap()
}

fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn wbasis_ids(k_max: usize) -> Vec<HamiltonianId> {
    (1..=k_max).flat_map(|k| (0..=k).map(move |n| HamiltonianId::Wbasis { k, n })).collect()
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn w_h_identity() -> Outcome {
    let start = Instant::now();
    let mut s = Sampler::seeded(1001);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mu = s.block_operator(dims(2, 3), 1.0);
        let w = w_table(8, &mu);
        let h = h_table(7, &mu);
        let norm = mu.frobenius_norm();
        for k in 1..=8 {
            for l in 0..k {
                let mut comb = BlockOperator::zeros(mu.dims());
                for n in 1..=l + 1 {
                    let c = p_coeff(l, n, k as i64).max(0);
                    if c != 0 {
                        comb = &comb + &h[l][n].scale_re(c as f64);
                    }
                }
                let r = (&w[k][k - l] - &comb).frobenius_norm() / norm.powi(l as i32);
                worst = worst.max(r);
            }
        }
    }
    let t = start.elapsed();
    check(worst <= 1e-9 && within(t, 10.0), format!("max residual/|mu|^l = {worst:.2e} (tol 1e-9), {t:.2?}"))
}

fn commutation_and_forms() -> Outcome {
    let start = Instant::now();
    let mut s = Sampler::seeded(1002);
    let (mut comm, mut forms) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = s.point(dims(2, 3), 1.0, 0.3);
        let pp = BlockOperator::p_plus(p.dims());
        let w = w_table(8, &p.mu);
        for k in 1..=8 {
            for n in 1..=k {
                let r = &p.mu.commutator(&w[k][n]) + &pp.commutator(&w[k][n - 1]);
                comm = comm.max(r.frobenius_norm());
            }
        }
        for k in 1..=5 {
            for n in 0..=k {
                let id = HamiltonianId::Wbasis { k, n };
                let a = flow_rhs(&id, FlowForm::W, &p).unwrap();
                let b = flow_rhs(&id, FlowForm::Mu, &p).unwrap();
                let c = flow_rhs(&id, FlowForm::PPlus, &p).unwrap();
                forms = forms.max((&a - &b).frobenius_norm()).max((&a - &c).frobenius_norm());
            }
        }
    }
    let t = start.elapsed();
    check(
        comm <= 1e-10 && forms <= 1e-10 && within(t, 5.0),
        format!("commutation {comm:.2e}, forms {forms:.2e} (tol 1e-10), {t:.2?}"),
    )
}

/// Rescales `(γ, μ)` so that `|rhs|/|μ|` equals `rate` for a degree-`l` flow.
fn normalise(id: HamiltonianId, form: FlowForm, p: &ExtendedPoint, rate: f64) -> ExtendedPoint {
    let HamiltonianId::Hbasis { l, .. } = id else { unreachable!() };
    let r = flow_rhs(&id, form, p).unwrap().frobenius_norm() / p.mu.frobenius_norm();
    let c = (rate / r).powf(1.0 / l as f64);
    ExtendedPoint::new(p.gamma * c, p.mu.scale_re(c))
}

fn casimir_drift(traj: &Trajectory, k: usize) -> f64 {
    let c0 = casimir(k, &traj.points[0], 1.0);
    traj.points.iter().map(|q| (casimir(k, q, 1.0) - c0).norm()).fold(0.0, f64::max)
}

fn casimir_invariance() -> Outcome {
    let mut s = Sampler::seeded(1003);
    let mut coad = 0.0f64;
    for _ in 0..20 {
        let p = s.point(dims(2, 3), 1.0, 0.5);
        let a = s.near_identity(p.dims(), 0.2);
        let q = group_coad(&a, &p).unwrap();
        for k in 1..=5 {
            coad = coad.max((casimir(k, &q, 1.0) - casimir(k, &p, 1.0)).norm());
        }
    }

    let real = Sampler::seeded(1).real_form_point(dims(2, 3), 1.0, 1.0);
    let ricatti = FourDimState {
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
    .to_point();
    let cases = [
        ("h0", HamiltonianId::Hbasis { l: 3, n: 0 }, &real, 3.0),
        ("h1", HamiltonianId::Hbasis { l: 2, n: 1 }, &real, 3.0),
        ("ricatti", HamiltonianId::Hbasis { l: 3, n: 0 }, &ricatti, 4.0),
    ];
    let mut ok = coad <= 1e-9;
    let mut detail = format!("coadjoint {coad:.2e} (tol 1e-9); orders");
    for (name, id, p, rate) in cases {
        let p = normalise(id, FlowForm::Real, p, rate);
        let drifts: Vec<Vec<f64>> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&dt| {
                let traj = integrate(&FlowSpec::new(id, FlowForm::Real, Integrator::Rk4, dt, 1.0), &p).unwrap();
                (1..=3).map(|k| casimir_drift(&traj, k)).collect()
            })
            .collect();
        // least-squares slope in log-log over equally spaced log dt
        let orders: Vec<f64> = (0..3).map(|i| (drifts[0][i] / drifts[2][i]).log10() / 2.0).collect();
        ok &= orders.iter().all(|o| (o - 4.0).abs() <= 0.3);
        detail += &format!(" {name} [{}]", orders.iter().map(|o| format!("{o:.2}")).collect::<Vec<_>>().join(", "));
    }
    check(ok, detail + " (4.0 ± 0.3)")
}

fn structural_invariants() -> Outcome {
    let mut s = Sampler::seeded(1004);
    let p = s.point(dims(2, 3), 1.0, 0.4);
    let spec = FlowSpec::new(HamiltonianId::Wbasis { k: 3, n: 1 }, FlowForm::PPlus, Integrator::Rk4, 1e-4, 1.0);
    let diag = monitor(&integrate(&spec, &p).unwrap(), &[]).diag_drift;

    let q = s.real_form_point(dims(2, 3), 1.0, 0.5);
    let id = HamiltonianId::Hbasis { l: 2, n: 1 };
    let mut spec = FlowSpec::new(id, FlowForm::Real, Integrator::LieEulerConj, 1e-3, 10.0);
    spec.real_form = true;
    spec.record_every = 10;
    let spectrum = monitor(&integrate(&spec, &q).unwrap(), &[]).spectrum_drift;

    let mut real = 0.0f64;
    for (l, n) in [(1, 0), (2, 1), (3, 0), (3, 2)] {
        let mut spec = FlowSpec::new(HamiltonianId::Hbasis { l, n }, FlowForm::Real, Integrator::Rk4, 1e-3, 1.0);
        spec.real_form = true;
        real = real.max(monitor(&integrate(&spec, &q).unwrap(), &[]).real_form_residual);
    }
    check(
        diag <= 1e-13 && spectrum <= 1e-11 && real <= 1e-12,
        format!("diagonal blocks {diag:.2e} (1e-13), spectrum {spectrum:.2e} (1e-11), skew-hermitian {real:.2e} (1e-12)"),
    )
}

fn involution_and_magri() -> Outcome {
    let mut s = Sampler::seeded(1005);
    let ids = wbasis_ids(5);
    let (mut inv, mut magri) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = s.point(dims(2, 3), 1.0, 0.4);
        let grads: Vec<_> = ids.iter().map(|id| Hamiltonian(*id)).collect();
        for eps in [0.0, 0.5, 1.0] {
            for a in &grads {
                for b in &grads {
                    inv = inv.max(poisson_bracket(a, b, &p, eps).unwrap().norm());
                }
            }
        }
        let x = s.block_operator(p.dims(), 1.0);
        for k in 1..=5 {
            for n in 0..k {
                let lower = hamiltonian_gradient(&HamiltonianId::Wbasis { k, n }, &p).unwrap().d_mu;
                let upper = hamiltonian_gradient(&HamiltonianId::Wbasis { k, n: n + 1 }, &p).unwrap().d_mu;
                let first = pencil_parts(&upper, &x, &p).unwrap().0;
                let second = pencil_parts(&lower, &x, &p).unwrap().1;
                magri = magri.max((first - second).norm());
            }
        }
    }
    check(inv <= 1e-10 && magri <= 1e-9, format!("involution {inv:.2e} (1e-10), chain {magri:.2e} (1e-9)"))
}

fn vector_case() -> Outcome {
    let start = Instant::now();
    let mut s = Sampler::seeded(1006);
    let mut worst = 0.0f64;
    for k in 1..=3 {
        let p = s.point(dims(1, 4), 1.0, 0.5);
        let spec = FlowSpec::new(HamiltonianId::Hbasis { l: k, n: 0 }, FlowForm::H, Integrator::Rk4, 1e-3, 1.0);
        let traj = integrate(&spec, &p).unwrap();
        let st0 = VectorCaseState::from_operator(&p.mu).unwrap();
        for (t, q) in traj.times.iter().zip(traj.points.iter()).step_by(50) {
            let oracle = vector_case_solution(&st0, p.gamma, &BTreeMap::from([(k, *t)])).unwrap();
            let got = VectorCaseState::from_operator(&q.mu).unwrap();
            worst = worst.max(got.distance(&oracle));
        }
    }
    let t = start.elapsed();
    check(worst <= 1e-6 && within(t, 5.0), format!("max componentwise error {worst:.2e} (1e-6), {t:.2?}"))
}

fn four_dim() -> Outcome {
    let s0 = FourDimState {
        chi: 0.8,
        a1: 0.3,
        a2: -0.5,
        d1: 0.7,
        d2: -0.2,
        a: c64(0.4, 0.3),
        b: c64(-0.2, 0.5),
        c: c64(0.6, -0.1),
        d: c64(0.1, 0.35),
    };
    let Some(period) = four_dim_quasi_period(&s0, 200.0) else {
        return check(false, "no quasi-period found");
    };
    let dt = 1e-3;
    let steps = (period / dt).ceil() as usize;
    let mut spec = FlowSpec::new(HamiltonianId::Hbasis { l: 3, n: 0 }, FlowForm::Real, Integrator::Rk4, period / steps as f64, period);
    spec.real_form = true;
    let traj = integrate(&spec, &s0.to_point()).unwrap();
    let states: Vec<FourDimState> = traj.points.iter().map(|p| FourDimState::from_point(p).unwrap()).collect();
    let i0 = four_dim_invariants(&s0);
    let mut moduli = 0.0f64;
    for st in &states {
        let i = four_dim_invariants(st);
        for (a, b) in [(i.p2, i0.p2), (i.q2, i0.q2), (i.r2, i0.r2), (i.s2, i0.s2), (i.delta, i0.delta)] {
            moduli = moduli.max((a - b).abs());
        }
    }
    let h = period / steps as f64;
    let x: Vec<f64> = states.iter().map(|st| st.a.norm_sqr()).collect();
    let mut rate = 0.0f64;
    for j in 2..x.len() - 2 {
        let dx = (x[j - 2] - 8.0 * x[j - 1] + 8.0 * x[j + 1] - x[j + 2]) / (12.0 * h);
        let want = 2.0 * s0.chi * four_dim_invariants(&states[j]).q.im;
        rate = rate.max((dx - want).abs());
    }
    let evolved = four_dim_evolve(&s0, period).unwrap();
    let reduction = evolved.distance(states.last().unwrap());
    check(
        moduli <= 1e-8 && rate <= 1e-6 && reduction <= 1e-5,
        format!(
            "moduli {moduli:.2e} (1e-8), dx/dt {rate:.2e} (1e-6), reduction vs direct {reduction:.2e} (1e-5) over T = {period:.4}"
        ),
    )
}

fn generating() -> Outcome {
    let mut s = Sampler::seeded(1008);
    let (mut rel, mut bracket) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = s.point(dims(2, 3), 1.0, 0.3);
        let lambda = s.complex(0.5);
        let bound = p.mu.star_norm() + (lambda * p.gamma).norm();
        let kappa = C64::from_polar(0.5 / bound, s.real(3.0));
        let closed = generating_hamiltonian(kappa, lambda, &p).unwrap();
        let series = generating_series(kappa, lambda, &p, 60).unwrap();
        rel = rel.max((closed - series.value).norm() / closed.norm().max(f64::MIN_POSITIVE));

        let kappa2 = C64::from_polar(0.3 / bound, s.real(3.0));
        let lambda2 = s.complex(0.5);
        let f = Hamiltonian(HamiltonianId::Generating { kappa, lambda });
        let g = Hamiltonian(HamiltonianId::Generating { kappa: kappa2, lambda: lambda2 });
        if (kappa2.norm() * (p.mu.star_norm() + (lambda2 * p.gamma).norm())) < 0.5 {
            bracket = bracket.max(poisson_bracket(&f, &g, &p, 1.0).unwrap().norm());
        }
    }
    check(rel <= 1e-8 && bracket <= 1e-8, format!("closed vs series {rel:.2e} (1e-8), bracket {bracket:.2e} (1e-8)"))
}

fn extension_lab() -> Outcome {
    let mut s = Sampler::seeded(1009);
    let d = dims(2, 3);
    let (mut cocycle, mut schw, mut adfd, mut jacobi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let element = |s: &mut Sampler| ExtendedAlgebraElement { rho: s.cmatrix(2, 2, 1.0), x: s.block_operator(d, 1.0) };
    for _ in 0..10 {
        let (a1, a2, a3) = (s.near_identity(d, 0.1), s.near_identity(d, 0.1), s.near_identity(d, 0.1));
        let n = s.near_identity_matrix(2, 0.1);
        cocycle = cocycle.max(cocycle_residuals(&a1, &a2, &a3, &n).unwrap().max());

        let (x, y) = (s.block_operator(d, 1.0), s.block_operator(d, 1.0));
        let fd = det_omega_mixed_derivative_fd(&x, &y, MIXED_FD_STEP).unwrap();
        schw = schw.max((fd + schwinger(&x, &y).unwrap()).norm());

        let (dir, e) = (element(&mut s), element(&mut s));
        let got = adjoint_derivative_fd(&dir, &e, 1e-5).unwrap();
        let want = extended_bracket(&dir, &e).unwrap();
        adfd = adfd.max(grhier::linalg::frobenius_norm(&(&got.rho - &want.rho))).max((&got.x - &want.x).max_abs());

        let c = element(&mut s);
        let j = |p: &ExtendedAlgebraElement, q: &ExtendedAlgebraElement, r: &ExtendedAlgebraElement| {
            extended_bracket(p, &extended_bracket(q, r).unwrap()).unwrap()
        };
        let (t1, t2, t3) = (j(&dir, &e, &c), j(&e, &c, &dir), j(&c, &dir, &e));
        jacobi = jacobi
            .max(grhier::linalg::frobenius_norm(&(&t1.rho + &t2.rho + &t3.rho)))
            .max((&(&t1.x + &t2.x) + &t3.x).max_abs());
    }
    check(
        cocycle <= 1e-10 && schw <= 1e-5 && adfd <= 1e-5 && jacobi <= 1e-11,
        format!("cocycle {cocycle:.2e} (1e-10), Schwinger FD {schw:.2e} (1e-5), Ad FD {adfd:.2e} (1e-5), Jacobi {jacobi:.2e} (1e-11)"),
    )
}

fn grassmann_leaf() -> Outcome {
    let mut s = Sampler::seeded(1010);
    let mut worst = 0.0f64;
    let flows = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 2)];
    for chi in [0.7, 1.3] {
        let basis = s.cmatrix(5, 2, 1.0);
        let p = grassmann_embed(c64(0.0, chi), &basis, dims(2, 3)).unwrap();
        for (l, n) in flows {
            let mut spec = FlowSpec::new(HamiltonianId::Hbasis { l, n }, FlowForm::Real, Integrator::Rk4, 1e-3, 1.0);
            spec.real_form = true;
            worst = worst.max(grassmann_zz_invariance(&integrate(&spec, &p).unwrap()).unwrap());
        }
    }
    check(worst <= 1e-8, format!("z⁺z spectrum drift {worst:.2e} (1e-8)"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 W-H expansion identity", w_h_identity),
        ("2 commutation relation and flow forms", commutation_and_forms),
        ("3 Casimir invariance and RK4 drift order", casimir_invariance),
        ("4 structural invariants", structural_invariants),
        ("5 involution and Magri chain", involution_and_magri),
        ("6 vector-case oracle", vector_case),
        ("7 four-dimensional oracle", four_dim),
        ("8 generating Hamiltonian", generating),
        ("9 extension lab", extension_lab),
        ("10 Grassmannian leaf", grassmann_leaf),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.pass);
        println!("{tag} [{name}] {} ({:.2?})", outcome.detail, start.elapsed());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
