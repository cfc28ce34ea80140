//! Run configuration: TOML with dotted sections, complex scalars as `"re+imi"`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use grhier::integrators::{FlowSpec, Integrator};
use grhier::oracles::{grassmann_from_z, FourDimState, GrassmannPoint};
use grhier::random::Sampler;
use grhier::{BlockOperator, CMatrix, Dims, ExtendedPoint, FlowForm, HamiltonianId, C64};
use serde::Deserialize;

use crate::exit::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub dims: DimsConfig,
    pub initial: InitialConfig,
    pub flow: FlowConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Parameter grid, only read by `sweep`.
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsConfig {
    pub n_plus: usize,
    pub n_minus: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Random,
    RealRandom,
    Grassmann,
    VectorCase,
    FourDim,
    Explicit,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    pub gamma: Option<String>,
    #[serde(default = "default_scale")]
    pub scale: f64,
    /// Grassmann coordinate, `n₋` rows of `n₊` entries.
    pub z: Option<Vec<Vec<String>>>,
    /// Full `μ`, `n₊+n₋` rows.
    pub mu: Option<Vec<Vec<String>>>,
    pub chi: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub c: Option<String>,
    pub d: Option<String>,
}

fn default_scale() -> f64 {
    0.5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub hamiltonian: String,
    pub form: String,
    #[serde(default = "default_integrator")]
    pub integrator: String,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub real_form: bool,
}

fn default_integrator() -> String {
    "RK4".into()
}

fn default_record_every() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_csv")]
    pub path: PathBuf,
    /// Defaults to `path` with a `.json` extension.
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub observables: Vec<String>,
    #[serde(default = "default_casimirs")]
    pub casimirs: Vec<usize>,
}

fn default_csv() -> PathBuf {
    PathBuf::from("trajectory.csv")
}

fn default_casimirs() -> Vec<usize> {
    vec![1, 2, 3]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: default_csv(), report: None, observables: Vec::new(), casimirs: default_casimirs() }
    }
}

impl OutputConfig {
    pub fn report_path(&self) -> PathBuf {
        self.report.clone().unwrap_or_else(|| self.path.with_extension("json"))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted config key → list of values.
    pub grid: BTreeMap<String, Vec<toml::Value>>,
}

pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    t.parse::<C64>().map_err(|_| CliError::parse(format!("`{s}` is not a complex number of the form re+imi")))
}

fn complex_rows(rows: &[Vec<String>], nrows: usize, ncols: usize, what: &str) -> Result<CMatrix, CliError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::parse(format!("{what} must be {nrows}×{ncols}")));
    }
    let mut m = CMatrix::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(v)?;
        }
    }
    Ok(m)
}

/// Everything a run needs, resolved from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: FlowSpec,
    pub point: ExtendedPoint,
    pub observables: Vec<Observable>,
    pub casimirs: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Hamiltonian,
    Trace,
    Moduli,
    Zz,
    Blocks,
}

impl Observable {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "hamiltonian" => Observable::Hamiltonian,
            "trace" => Observable::Trace,
            "moduli" => Observable::Moduli,
            "zz" => Observable::Zz,
            "blocks" => Observable::Blocks,
            _ => {
                return Err(CliError::parse(format!(
                    "unknown observable `{s}` (hamiltonian, trace, moduli, zz, blocks)"
                )))
            }
        })
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::parse(format!("config: {e}")))
    }

    pub fn from_value(value: toml::Value) -> Result<Self, CliError> {
        value.try_into().map_err(|e| CliError::parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<(Self, toml::Value), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        let cfg = Self::from_toml_str(&text)?;
        let value = toml::from_str(&text).map_err(|e| CliError::parse(format!("config: {e}")))?;
        Ok((cfg, value))
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let dims = Dims::new(self.dims.n_plus, self.dims.n_minus).map_err(CliError::parse_from)?;
        let f = &self.flow;
        let id: HamiltonianId = f.hamiltonian.parse().map_err(CliError::parse_from)?;
        let form: FlowForm = f.form.parse().map_err(CliError::parse_from)?;
        let integrator: Integrator = f.integrator.parse().map_err(CliError::parse_from)?;
        let mut spec = FlowSpec::new(id, form, integrator, f.dt, f.t_end);
        spec.record_every = f.record_every;
        spec.real_form = f.real_form;
        spec.validate().map_err(CliError::parse_from)?;

        let point = self.initial_point(dims)?;
        if spec.real_form {
            if point.gamma.re != 0.0 {
                return Err(CliError::parse("real_form needs an imaginary gamma"));
            }
            let r = point.real_form_residual();
            if r > grhier::polarized::REAL_FORM_TOLERANCE {
                return Err(CliError::parse(format!("real_form needs a skew-hermitian initial mu (residual {r:e})")));
            }
        }
        let observables =
            self.output.observables.iter().map(|s| Observable::parse(s)).collect::<Result<Vec<_>, _>>()?;
        if observables.contains(&Observable::Moduli) && self.initial.kind != InitialKind::FourDim {
            return Err(CliError::parse("the moduli observable needs kind = \"four-dim\""));
        }
        if self.output.casimirs.contains(&0) {
            return Err(CliError::parse("Casimir orders start at 1"));
        }
        Ok(Resolved { spec, point, observables, casimirs: self.output.casimirs.clone() })
    }

    fn gamma(&self) -> Result<C64, CliError> {
        match &self.initial.gamma {
            Some(g) => parse_complex(g),
            None => Err(CliError::parse("initial.gamma is required for this kind")),
        }
    }

    fn initial_point(&self, dims: Dims) -> Result<ExtendedPoint, CliError> {
        let init = &self.initial;
        let mut sampler = Sampler::seeded(self.seed);
        match init.kind {
            InitialKind::Random => Ok(ExtendedPoint::new(self.gamma()?, sampler.block_operator(dims, init.scale))),
            InitialKind::RealRandom => {
                let gamma = self.gamma()?;
                if gamma.re != 0.0 {
                    return Err(CliError::parse("real-random needs an imaginary gamma"));
                }
                Ok(ExtendedPoint::new(gamma, sampler.skew_hermitian(dims, init.scale)))
            }
            InitialKind::VectorCase => {
                if dims.n_plus != 1 {
                    return Err(CliError::parse("vector-case needs n_plus = 1"));
                }
                Ok(ExtendedPoint::new(self.gamma()?, sampler.block_operator(dims, init.scale)))
            }
            InitialKind::Grassmann => {
                let rows = init.z.as_ref().ok_or_else(|| CliError::parse("grassmann needs initial.z"))?;
                let z = complex_rows(rows, dims.n_minus, dims.n_plus, "initial.z")?;
                grassmann_from_z(self.gamma()?, &GrassmannPoint { z }).map_err(CliError::parse_from)
            }
            InitialKind::Explicit => {
                let rows = init.mu.as_ref().ok_or_else(|| CliError::parse("explicit needs initial.mu"))?;
                let n = dims.total();
                let mu = BlockOperator::from_matrix(dims, complex_rows(rows, n, n, "initial.mu")?)
                    .map_err(CliError::parse_from)?;
                Ok(ExtendedPoint::new(self.gamma()?, mu))
            }
            InitialKind::FourDim => {
                if dims.n_plus != 2 || dims.n_minus != 2 {
                    return Err(CliError::parse("four-dim needs dims 2×2"));
                }
                let real = |v: Option<f64>, k: &str| v.ok_or_else(|| CliError::parse(format!("four-dim needs initial.{k}")));
                let cx = |v: &Option<String>, k: &str| match v {
                    Some(s) => parse_complex(s),
                    None => Err(CliError::parse(format!("four-dim needs initial.{k}"))),
                };
                let s = FourDimState {
                    chi: real(init.chi, "chi")?,
                    a1: real(init.a1, "a1")?,
                    a2: real(init.a2, "a2")?,
                    d1: real(init.d1, "d1")?,
                    d2: real(init.d2, "d2")?,
                    a: cx(&init.a, "a")?,
                    b: cx(&init.b, "b")?,
                    c: cx(&init.c, "c")?,
                    d: cx(&init.d, "d")?,
                };
                Ok(s.to_point())
            }
        }
    }
}

/// Sets `key` (dotted path) in a TOML table, creating intermediate tables.
pub fn set_dotted(root: &mut toml::Value, key: &str, value: toml::Value) -> Result<(), CliError> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = cur.as_table_mut().ok_or_else(|| CliError::parse(format!("`{key}` does not address a table")))?;
        if i + 1 == parts.len() {
            table.insert((*part).to_string(), value);
            return Ok(());
        }
        cur = table.entry((*part).to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
    }
    Err(CliError::parse("empty sweep key"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
seed = 3
[dims]
n_plus = 2
n_minus = 2
[initial]
kind = "random"
gamma = "1+0.5i"
[flow]
hamiltonian = "H(2,1)"
form = "H"
dt = 0.01
t_end = 0.1
"#;

    #[test]
    fn complex_strings() {
        assert_eq!(parse_complex("1.5-2i").unwrap(), C64::new(1.5, -2.0));
        assert_eq!(parse_complex("0.8i").unwrap(), C64::new(0.0, 0.8));
        assert_eq!(parse_complex("-3").unwrap(), C64::new(-3.0, 0.0));
        assert_eq!(parse_complex(" 1e-3 + 2e-1i ").unwrap(), C64::new(1e-3, 0.2));
        assert!(parse_complex("one").is_err());
    }

    #[test]
    fn minimal_config_resolves() {
        let cfg = RunConfig::from_toml_str(BASE).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.spec.id, HamiltonianId::Hbasis { l: 2, n: 1 });
        assert_eq!(r.point.gamma, C64::new(1.0, 0.5));
        assert_eq!(r.casimirs, vec![1, 2, 3]);
        assert_eq!(cfg.output.report_path(), PathBuf::from("trajectory.json"));
    }

    #[test]
    fn bad_configs_are_parse_errors() {
        for (from, to) in [
            ("form = \"H\"", "form = \"Q\""),
            ("hamiltonian = \"H(2,1)\"", "hamiltonian = \"H(2,9)\""),
            ("gamma = \"1+0.5i\"", "gamma = \"x\""),
            ("dt = 0.01", "dt = -1.0"),
            ("seed = 3", "seed = 3\nbogus = 1"),
        ] {
            let text = BASE.replace(from, to);
            let err = RunConfig::from_toml_str(&text).and_then(|c| c.resolve().map(|_| ())).unwrap_err();
            assert_eq!(err.code, 2, "{to}");
        }
    }

    #[test]
    fn real_form_requires_imaginary_gamma() {
        let text = BASE.replace("kind = \"random\"", "kind = \"real-random\"").replace("t_end = 0.1", "t_end = 0.1\nreal_form = true");
        assert!(RunConfig::from_toml_str(&text).unwrap().resolve().is_err());
        let text = text.replace("gamma = \"1+0.5i\"", "gamma = \"0.5i\"");
        assert!(RunConfig::from_toml_str(&text).unwrap().resolve().is_ok());
    }

    #[test]
    fn dotted_override() {
        let mut v: toml::Value = toml::from_str(BASE).unwrap();
        set_dotted(&mut v, "flow.dt", toml::Value::Float(0.05)).unwrap();
        set_dotted(&mut v, "output.casimirs", toml::Value::Array(vec![toml::Value::Integer(2)])).unwrap();
        let cfg = RunConfig::from_value(v).unwrap();
        assert_eq!(cfg.flow.dt, 0.05);
        assert_eq!(cfg.output.casimirs, vec![2]);
    }
}
