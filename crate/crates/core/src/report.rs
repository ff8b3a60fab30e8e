//! Run configuration, verification reports and residual tables.
//!
//! Reports are JSON (schema in `docs/report-schema.md`); sweep tables are CSV with the
//! columns `Lmax,epsilon,residual`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PrincipalParams;

/// Version of the report layout; bumped only on breaking changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    OrthoBulk,
    OrthoBoundary,
    Expansion,
    BoundaryLimit,
    #[serde(rename = "transform-F1")]
    TransformF1,
    #[serde(rename = "transform-F2")]
    TransformF2,
    Antipodal,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::OrthoBulk,
        Suite::OrthoBoundary,
        Suite::Expansion,
        Suite::BoundaryLimit,
        Suite::TransformF1,
        Suite::TransformF2,
        Suite::Antipodal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::OrthoBulk => "ortho-bulk",
            Suite::OrthoBoundary => "ortho-boundary",
            Suite::Expansion => "expansion",
            Suite::BoundaryLimit => "boundary-limit",
            Suite::TransformF1 => "transform-F1",
            Suite::TransformF2 => "transform-F2",
            Suite::Antipodal => "antipodal",
        }
    }

    /// Degree cutoff used when the configuration does not set one.
    pub fn default_lmax(&self) -> usize {
        match self {
            Suite::OrthoBulk => 4,
            Suite::OrthoBoundary => 6,
            Suite::Expansion => crate::tolerance::DEFAULT_LMAX_EXPANSION,
            Suite::BoundaryLimit | Suite::TransformF1 | Suite::TransformF2 => 3,
            Suite::Antipodal => 1,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|suite| suite.name().eq_ignore_ascii_case(s)).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
            Error::Config(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!("unknown format '{other}' (json or csv)"))),
        }
    }
}

/// Everything a verification run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub d: usize,
    pub nu: f64,
    /// Degree cutoff; each suite has its own default.
    pub lmax: Option<usize>,
    pub epsilon: f64,
    /// Exactness of the product grids; defaults to what the degree cutoff needs.
    pub grid_exactness: Option<usize>,
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 3,
            nu: 1.0,
            lmax: None,
            epsilon: crate::tolerance::DEFAULT_EPSILON,
            grid_exactness: None,
            seed: 0,
            suites: Vec::new(),
            output_path: None,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    /// Applies the parameter gates; errors are `Error::Config`.
    pub fn validate(&self) -> Result<PrincipalParams> {
        let params = PrincipalParams::unit(self.d, self.nu).map_err(|e| match e {
            Error::InvalidParams(msg) => Error::Config(msg),
            other => Error::Config(other.to_string()),
        })?;
        if self.d != 3 && self.d != 4 {
            return Err(Error::Config(format!("d = {} is not implemented (3 or 4)", self.d)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon = {} must be positive", self.epsilon)));
        }
        Ok(params)
    }

    pub fn lmax_for(&self, suite: Suite) -> usize {
        self.lmax.unwrap_or_else(|| suite.default_lmax())
    }
}

/// Parameters as echoed in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub d: usize,
    pub radius: f64,
    pub nu: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub casimir: f64,
}

impl From<&PrincipalParams> for ParamsEcho {
    fn from(p: &PrincipalParams) -> Self {
        let t = p.tau();
        Self { d: p.d, radius: p.radius, nu: p.nu, tau_re: t.re, tau_im: t.im, casimir: p.casimir_eigenvalue() }
    }
}

/// One verified identity. `passed` holds exactly when `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Absent when the evaluation failed.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl Check {
    pub fn measured(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let finite = residual.is_finite();
        Self {
            name: name.into(),
            residual: finite.then_some(residual),
            tolerance,
            passed: finite && residual <= tolerance,
            error: (!finite).then(|| format!("non-finite residual {residual}")),
            metadata: BTreeMap::new(),
        }
    }

    pub fn errored(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Self {
            name: name.into(),
            residual: None,
            tolerance,
            passed: false,
            error: Some(err.to_string()),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.metadata.insert(key.to_string(), v);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub check: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub run_id: String,
    pub suite: String,
    pub params: ParamsEcho,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub timings: Vec<Timing>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))
    }

    /// One row per check: `suite,check,residual,tolerance,passed,error`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["suite", "check", "residual", "tolerance", "passed", "error"]).map_err(io)?;
        for c in &self.checks {
            let residual = c.residual.map(|r| format!("{r:e}")).unwrap_or_default();
            w.write_record([
                self.suite.as_str(),
                c.name.as_str(),
                &residual,
                &format!("{:e}", c.tolerance),
                if c.passed { "true" } else { "false" },
                c.error.as_deref().unwrap_or(""),
            ])
            .map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        let body = match format {
            OutputFormat::Json => self.to_json()?,
            OutputFormat::Csv => self.to_csv()?,
        };
        std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// Deterministic identifier of a run.
pub fn run_id(suites: &[Suite], cfg: &RunConfig) -> String {
    let names: Vec<_> = suites.iter().map(|s| s.name()).collect();
    format!("{}-d{}-nu{}-seed{}", names.join("+"), cfg.d, cfg.nu, cfg.seed)
}

/// One cell of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lmax: usize,
    pub epsilon: f64,
    pub residual: f64,
}

/// CSV with header `Lmax,epsilon,residual`, rows in the given order.
pub fn residual_table_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["Lmax", "epsilon", "residual"]).map_err(io)?;
    for r in rows {
        w.write_record([r.lmax.to_string(), format!("{}", r.epsilon), format!("{:e}", r.residual)]).map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}

pub fn emit_residual_table(rows: &[SweepRow], path: &Path) -> Result<()> {
    std::fs::write(path, residual_table_csv(rows)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
