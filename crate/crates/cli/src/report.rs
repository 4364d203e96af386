//! Result rows, fit summaries and verdicts, and the artifact directory they
//! are written to.

use std::path::{Path, PathBuf};

use fracfield_core::asymptotics::SweepResult;
use serde::Serialize;

use crate::error::{CliError, Result};

/// One CSV row. Unused coordinates stay empty. Rows carry no timing so that a
/// rerun reproduces the file byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub suite: String,
    pub criterion: String,
    pub s: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub geometry: String,
    pub param: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub err_est: Option<f64>,
}

impl Record {
    pub fn new(criterion: &str, quantity: impl Into<String>, value: f64) -> Self {
        Self {
            suite: String::new(),
            criterion: criterion.to_string(),
            s: None,
            eps: None,
            delta: None,
            geometry: String::new(),
            param: None,
            quantity: quantity.into(),
            value,
            err_est: None,
        }
    }

    pub fn s(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn geometry(mut self, geometry: impl ToString) -> Self {
        self.geometry = geometry.to_string();
        self
    }

    pub fn param(mut self, param: f64) -> Self {
        self.param = Some(param);
        self
    }

    pub fn err(mut self, err: f64) -> Self {
        self.err_est = Some(err);
        self
    }
}

/// A named extrapolation.
#[derive(Debug, Clone, Serialize)]
pub struct FitRecord {
    pub criterion: String,
    pub label: String,
    pub fit: SweepResult,
}

/// One pass/fail comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `|measured - expected| <= tolerance`.
    pub fn abs(id: &str, name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        Self { id: id.into(), name: name.into(), measured, expected, tolerance, pass }
    }

    /// `|measured - expected| <= tolerance |expected|`.
    pub fn rel(id: &str, name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance * expected.abs();
        Self { id: id.into(), name: name.into(), measured, expected, tolerance, pass }
    }

    /// `measured <= bound`; `expected` holds the bound and `tolerance` is 0.
    pub fn at_most(id: &str, name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { id: id.into(), name: name.into(), measured, expected: bound, tolerance: 0.0, pass: measured <= bound }
    }

    /// `measured >= bound`.
    pub fn at_least(id: &str, name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { id: id.into(), name: name.into(), measured, expected: bound, tolerance: 0.0, pass: measured >= bound }
    }

    /// A yes/no property, recorded as 1 or 0 against an expected 1.
    pub fn holds(id: &str, name: impl Into<String>, ok: bool) -> Self {
        let measured = if ok { 1.0 } else { 0.0 };
        Self { id: id.into(), name: name.into(), measured, expected: 1.0, tolerance: 0.0, pass: ok }
    }
}

/// Everything a suite produced.
#[derive(Debug, Clone, Default)]
pub struct SuiteOutput {
    pub records: Vec<Record>,
    pub fits: Vec<FitRecord>,
    pub checks: Vec<Check>,
}

impl SuiteOutput {
    pub fn record(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn fit(&mut self, criterion: &str, label: impl Into<String>, fit: &SweepResult) {
        self.fits.push(FitRecord { criterion: criterion.into(), label: label.into(), fit: fit.clone() });
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionVerdict {
    pub id: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
    pub threads: usize,
    pub profile_cache: Option<String>,
}

impl Environment {
    pub fn current(cache: Option<&Path>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            profile_cache: cache.map(|p| p.display().to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub suite: String,
    pub coarse: bool,
    pub criteria: Vec<CriterionVerdict>,
    pub checks: Vec<Check>,
    pub environment: Environment,
    pub started_utc: String,
    pub wall_clock_seconds: f64,
    pub config: toml::Table,
}

impl VerdictReport {
    /// Per-criterion verdicts in order of first appearance: a criterion
    /// passes when all of its checks pass.
    pub fn criteria_from(checks: &[Check]) -> Vec<CriterionVerdict> {
        let mut out: Vec<CriterionVerdict> = vec![];
        for c in checks {
            match out.iter_mut().find(|v| v.id == c.id) {
                Some(v) => v.pass &= c.pass,
                None => out.push(CriterionVerdict { id: c.id.clone(), pass: c.pass }),
            }
        }
        out
    }

    pub fn failures(&self) -> usize {
        self.criteria.iter().filter(|c| !c.pass).count()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Creates `<root>/<suite>/<stamp>`, adding a numeric suffix if a run with
/// the same stamp exists.
pub fn create_run_dir(root: &Path, suite: &str, stamp: &str) -> Result<PathBuf> {
    let base = root.join(suite);
    std::fs::create_dir_all(&base).map_err(io_err(&base))?;
    for k in 0.. {
        let dir = if k == 0 { base.join(stamp) } else { base.join(format!("{stamp}-{k}")) };
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(io_err(&dir)(e)),
        }
    }
    unreachable!("the suffix search is unbounded")
}

pub fn write_csv(path: &Path, suite: &str, records: &[Record]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        let mut r = r.clone();
        r.suite = suite.to_string();
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(io_err(path))
}
