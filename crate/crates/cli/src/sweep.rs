//! `sweep`: a grid of independent runs and an aggregated summary.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{set_dotted, RunConfig};
use crate::exit::CliError;
use crate::simulate::{run, write_json, RunReport};

pub const THREADS_ENV: &str = "GRHIER_THREADS";
const DT_KEY: &str = "flow.dt";

#[derive(Debug, Clone, Serialize)]
pub struct RunEntry {
    pub index: usize,
    pub params: BTreeMap<String, serde_json::Value>,
    pub status: String,
    pub error: Option<String>,
    pub report: Option<RunReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub params: BTreeMap<String, serde_json::Value>,
    pub casimir: String,
    /// Least-squares slope of `log drift` against `log dt`.
    pub slope: f64,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub runs: Vec<RunEntry>,
    pub completed: usize,
    pub partial: usize,
    pub failed: usize,
    pub max_casimir_drift: BTreeMap<String, f64>,
    pub max_diag_drift: f64,
    pub max_spectrum_drift: f64,
    pub order_fits: Vec<OrderFit>,
}

fn grid_points(grid: &BTreeMap<String, Vec<toml::Value>>) -> Vec<Vec<(String, toml::Value)>> {
    let mut points = vec![Vec::new()];
    for (key, values) in grid {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for v in values {
                let mut q = p.clone();
                q.push((key.clone(), v.clone()));
                next.push(q);
            }
        }
        points = next;
    }
    points
}

fn to_json(v: &toml::Value) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn run_one(base: &toml::Value, index: usize, point: &[(String, toml::Value)], out: &Path) -> RunEntry {
    let params = point.iter().map(|(k, v)| (k.clone(), to_json(v))).collect();
    let result = (|| {
        let mut value = base.clone();
        if let Some(t) = value.as_table_mut() {
            t.remove("sweep");
        }
        for (k, v) in point {
            set_dotted(&mut value, k, v.clone())?;
        }
        let cfg = RunConfig::from_value(value)?;
        run(&cfg, &out.join(format!("run_{index:04}.csv")), &out.join(format!("run_{index:04}.json")))
    })();
    match result {
        Ok(report) => RunEntry {
            index,
            params,
            status: report.status.to_string(),
            error: report.abort_reason.clone(),
            report: Some(report),
        },
        Err(e) => RunEntry { index, params, status: "error".into(), error: Some(e.message), report: None },
    }
}

fn slope(points: &[[f64; 2]]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p[0].log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p[1].log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn order_fits(runs: &[RunEntry]) -> Vec<OrderFit> {
    let mut groups: BTreeMap<String, Vec<&RunEntry>> = BTreeMap::new();
    for r in runs.iter().filter(|r| r.status == "ok" && r.params.contains_key(DT_KEY)) {
        let mut rest = r.params.clone();
        rest.remove(DT_KEY);
        groups.entry(serde_json::to_string(&rest).unwrap_or_default()).or_default().push(r);
    }
    let mut fits = Vec::new();
    for members in groups.values() {
        let Some(first) = members[0].report.as_ref() else { continue };
        let mut params = members[0].params.clone();
        params.remove(DT_KEY);
        for key in first.invariants.casimir_drift.keys() {
            let mut points: Vec<[f64; 2]> = members
                .iter()
                .filter_map(|m| m.report.as_ref())
                .filter_map(|rep| rep.invariants.casimir_drift.get(key).map(|d| [rep.dt, *d]))
                .filter(|p| p[1] > 0.0 && p[1].is_finite())
                .collect();
            points.sort_by(|a, b| a[0].total_cmp(&b[0]));
            points.dedup_by(|a, b| a[0] == b[0]);
            if points.len() >= 2 {
                fits.push(OrderFit { params: params.clone(), casimir: key.clone(), slope: slope(&points), points });
            }
        }
    }
    fits
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::parse(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        },
        Err(_) => Ok(None),
    }
}

pub fn cmd_sweep(config: &Path, out: &Path) -> Result<SweepSummary, CliError> {
    let (cfg, base) = RunConfig::load(config)?;
    let grid = cfg.sweep.map(|s| s.grid).unwrap_or_default();
    if grid.values().any(|v| v.is_empty()) {
        return Err(CliError::parse("sweep.grid entries must be non-empty lists"));
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let points = grid_points(&grid);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::failure(e.to_string()))?;
    let runs: Vec<RunEntry> =
        pool.install(|| points.par_iter().enumerate().map(|(i, p)| run_one(&base, i, p, out)).collect());

    let reports: Vec<&RunReport> = runs.iter().filter_map(|r| r.report.as_ref()).collect();
    let mut max_casimir_drift = BTreeMap::new();
    for rep in &reports {
        for (k, d) in &rep.invariants.casimir_drift {
            let e = max_casimir_drift.entry(k.clone()).or_insert(0.0f64);
            *e = e.max(*d);
        }
    }
    let summary = SweepSummary {
        completed: runs.iter().filter(|r| r.status == "ok").count(),
        partial: runs.iter().filter(|r| r.status == "aborted").count(),
        failed: runs.iter().filter(|r| r.status == "error").count(),
        max_casimir_drift,
        max_diag_drift: reports.iter().map(|r| r.invariants.diag_drift).fold(0.0, f64::max),
        max_spectrum_drift: reports.iter().map(|r| r.invariants.spectrum_drift).fold(0.0, f64::max),
        order_fits: order_fits(&runs),
        runs,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_a_cartesian_product() {
        let grid = BTreeMap::from([
            ("a".to_string(), vec![toml::Value::Integer(1), toml::Value::Integer(2)]),
            ("b".to_string(), vec![toml::Value::Integer(3), toml::Value::Integer(4), toml::Value::Integer(5)]),
        ]);
        let points = grid_points(&grid);
        assert_eq!(points.len(), 6);
        assert_eq!(points[0], vec![("a".into(), toml::Value::Integer(1)), ("b".into(), toml::Value::Integer(3))]);
        assert_eq!(grid_points(&BTreeMap::new()), vec![Vec::new()]);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<[f64; 2]> = [1e-2, 1e-3, 1e-4].iter().map(|&h: &f64| [h, 3.0 * h.powi(4)]).collect();
        assert!((slope(&pts) - 4.0).abs() < 1e-12);
    }
}
