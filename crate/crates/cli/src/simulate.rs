//! `simulate`: one trajectory to CSV plus an invariant report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use grhier::hierarchy::{casimir, hamiltonian};
use grhier::integrators::{integrate, monitor, Trajectory};
use grhier::oracles::{four_dim_invariants, z_coordinate, FourDimState};
use grhier::{ExtendedPoint, HamiltonianId, C64};
use serde::Serialize;

use crate::config::{Observable, Resolved, RunConfig};
use crate::exit::CliError;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Invariants {
    pub casimir_drift: BTreeMap<String, f64>,
    pub diag_drift: f64,
    pub spectrum_drift: f64,
    pub hamiltonian_drift: Option<f64>,
    pub real_form_residual: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub status: &'static str,
    /// True when the run stopped before `t_end`; the CSV then holds the
    /// samples up to the failure.
    pub partial: bool,
    pub abort_reason: Option<String>,
    pub seed: u64,
    pub dims: [usize; 2],
    pub hamiltonian: String,
    pub form: String,
    pub integrator: String,
    pub dt: f64,
    pub t_end: f64,
    pub samples: usize,
    pub last_time: f64,
    pub invariants: Invariants,
    pub csv: PathBuf,
}

fn columns(obs: &[Observable], p0: &ExtendedPoint, ks: &[usize]) -> Vec<String> {
    let mut names = Vec::new();
    for o in obs {
        match o {
            Observable::Hamiltonian => names.push("h".to_string()),
            Observable::Trace => names.push("trace".to_string()),
            Observable::Moduli => names.extend(["p2", "q2", "r2", "s2", "delta", "x"].map(String::from)),
            Observable::Zz => names.extend((0..p0.dims().n_plus).map(|i| format!("zz{i}"))),
            Observable::Blocks => {
                let n = p0.dims().total();
                for i in 0..n {
                    for j in 0..n {
                        names.push(format!("mu_{i}_{j}"));
                    }
                }
            }
        }
    }
    names.extend(ks.iter().map(|k| format!("I{k}")));
    names
}

fn values(obs: &[Observable], id: &HamiltonianId, p: &ExtendedPoint, ks: &[usize]) -> Vec<C64> {
    let nan = C64::new(f64::NAN, f64::NAN);
    let mut out = Vec::new();
    for o in obs {
        match o {
            Observable::Hamiltonian => out.push(hamiltonian(id, p).unwrap_or(nan)),
            Observable::Trace => out.push(p.mu.restricted_trace()),
            Observable::Moduli => match FourDimState::from_point(p) {
                Ok(s) => {
                    let i = four_dim_invariants(&s);
                    out.extend([i.p2, i.q2, i.r2, i.s2, i.delta, i.x].map(|v| C64::new(v, 0.0)));
                }
                Err(_) => out.extend([nan; 6]),
            },
            Observable::Zz => match z_coordinate(p) {
                Ok(z) => out.extend(z.zz_spectrum().into_iter().map(|v| C64::new(v, 0.0))),
                Err(_) => out.extend(std::iter::repeat_n(nan, p.dims().n_plus)),
            },
            Observable::Blocks => out.extend(p.mu.matrix().transpose().iter().copied()),
        }
    }
    out.extend(ks.iter().map(|&k| casimir(k, p, 1.0)));
    out
}

pub fn write_csv(path: &Path, r: &Resolved, traj: &Trajectory) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::failure(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let mut header = vec!["t".to_string()];
    for c in columns(&r.observables, &r.point, &r.casimirs) {
        header.push(format!("{c}_re"));
        header.push(format!("{c}_im"));
    }
    w.write_record(&header).map_err(io)?;
    for (t, p) in traj.times.iter().zip(traj.points.iter()) {
        let mut row = vec![t.to_string()];
        for v in values(&r.observables, &r.spec.id, p, &r.casimirs) {
            row.push(v.re.to_string());
            row.push(v.im.to_string());
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::failure(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Runs `cfg`, writing the CSV and report to the given paths. A numerical
/// abort still writes both and returns a report with `partial = true`.
pub fn run(cfg: &RunConfig, csv_path: &Path, report_path: &Path) -> Result<RunReport, CliError> {
    let r = cfg.resolve()?;
    let traj = integrate(&r.spec, &r.point).map_err(CliError::parse_from)?;
    write_csv(csv_path, &r, &traj)?;
    let inv = monitor(&traj, &r.casimirs);
    let report = RunReport {
        status: if traj.aborted.is_some() { "aborted" } else { "ok" },
        partial: traj.aborted.is_some(),
        abort_reason: traj.aborted.clone(),
        seed: cfg.seed,
        dims: [cfg.dims.n_plus, cfg.dims.n_minus],
        hamiltonian: r.spec.id.to_string(),
        form: r.spec.form.name().to_string(),
        integrator: r.spec.integrator.name().to_string(),
        dt: r.spec.dt,
        t_end: r.spec.t_end,
        samples: traj.len(),
        last_time: traj.times.last().copied().unwrap_or(0.0),
        invariants: Invariants {
            casimir_drift: inv.casimir_drift.iter().map(|(k, d)| (format!("I{k}"), *d)).collect(),
            diag_drift: inv.diag_drift,
            spectrum_drift: inv.spectrum_drift,
            hamiltonian_drift: inv.hamiltonian_drift,
            real_form_residual: inv.real_form_residual,
        },
        csv: csv_path.to_path_buf(),
    };
    write_json(report_path, &report)?;
    Ok(report)
}

pub fn cmd_simulate(config: &Path) -> Result<RunReport, CliError> {
    let (cfg, _) = RunConfig::load(config)?;
    let report = run(&cfg, &cfg.output.path, &cfg.output.report_path())?;
    if let Some(reason) = &report.abort_reason {
        return Err(CliError::abort(format!("numerical abort ({reason}); partial output in {}", cfg.output.path.display())));
    }
    Ok(report)
}
