//! Suite implementations and the runner that writes their artifacts.

mod basic;
mod curved;
mod limsup;
mod perimeters;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use fracfield_core::foundations::{FracOrder, PotentialSpec, QuadratureSpec};
use fracfield_core::geometry::SetDescriptor;
use fracfield_core::profile::{cached_profile, Profile, ProfileGrid};

use crate::config::SuiteConfig;
use crate::error::{Annotate, CliError, Result};
use crate::report::{create_run_dir, write_csv, write_json, Environment, SuiteOutput, VerdictReport};

/// Environment variable naming the profile cache directory.
pub const CACHE_ENV: &str = "FRACFIELD_CACHE";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Quadrature tolerances widened 3x and ladders shortened by one rung.
    pub coarse: bool,
    pub cache_dir: Option<PathBuf>,
}

impl RunOptions {
    pub fn from_env(coarse: bool) -> Self {
        Self { coarse, cache_dir: std::env::var_os(CACHE_ENV).map(PathBuf::from) }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: VerdictReport,
    pub output: SuiteOutput,
    pub dir: PathBuf,
}

/// Read access to the config plus the run options.
pub(crate) struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    opts: &'a RunOptions,
}

impl<'a> Ctx<'a> {
    pub fn cfg(&self) -> &'a SuiteConfig {
        self.cfg
    }

    pub fn spec(&self) -> QuadratureSpec {
        let spec = QuadratureSpec::default().with_tolerances(self.cfg.rel_tol, self.cfg.abs_tol);
        if self.opts.coarse {
            spec.loosened(3.0)
        } else {
            spec
        }
    }

    /// An epsilon (or other) ladder; coarse runs drop the finest rung while at
    /// least `min` remain.
    pub fn ladder(&self, key: &str, min: usize) -> Result<Vec<f64>> {
        let mut v = self.cfg.numbers(key)?;
        if v.len() < min {
            return Err(CliError::Config(format!("key {key:?} needs at least {min} entries")));
        }
        if self.opts.coarse && v.len() > min {
            v.pop();
        }
        Ok(v)
    }

    pub fn potential(&self) -> Result<PotentialSpec> {
        let text = self.cfg.text("potential")?;
        let parts: Vec<&str> = text.split_whitespace().collect();
        match parts.as_slice() {
            ["quartic"] => Ok(PotentialSpec::quartic()),
            ["polynomial", coeffs @ ..] if !coeffs.is_empty() => {
                let c: std::result::Result<Vec<f64>, _> = coeffs.iter().map(|t| t.parse::<f64>()).collect();
                let c = c.map_err(|_| CliError::Config(format!("bad polynomial potential {text:?}")))?;
                Ok(PotentialSpec::polynomial(c)?)
            }
            _ => Err(CliError::Config(format!(
                "unknown potential {text:?}; use \"quartic\" or \"polynomial c0 c1 ...\""
            ))),
        }
    }

    pub fn profile(&self, s: FracOrder, criterion: &'static str) -> Result<Arc<Profile>> {
        let grid = ProfileGrid { z_max: self.cfg.number("profile_z_max")?, h: self.cfg.number("profile_h")? };
        let tol = self.cfg.number("profile_tol")?;
        let potential = self.potential()?;
        let p = cached_profile(self.opts.cache_dir.as_deref(), s, &potential, grid, tol).during(criterion)?;
        Ok(Arc::new(p))
    }

    pub fn set(&self, key: &str) -> Result<SetDescriptor> {
        let text = self.cfg.text(key)?;
        text.parse().map_err(|e| CliError::Config(format!("key {key:?}: {e}")))
    }
}

/// Runs the configured suite and writes `results.csv`, `fit.json` and
/// `verdict.json` to a fresh timestamped directory under the output root.
pub fn run_suite(cfg: &SuiteConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let output = compute(cfg, opts)?;
    let report = VerdictReport {
        suite: cfg.suite.clone(),
        coarse: opts.coarse,
        criteria: VerdictReport::criteria_from(&output.checks),
        checks: output.checks.clone(),
        environment: Environment::current(opts.cache_dir.as_deref()),
        started_utc: started.to_rfc3339(),
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        config: cfg.values().clone(),
    };
    let stamp = started.format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let dir = create_run_dir(&cfg.output_dir, &cfg.suite, &stamp)?;
    write_csv(&dir.join("results.csv"), &cfg.suite, &output.records)?;
    write_json(&dir.join("fit.json"), &output.fits)?;
    write_json(&dir.join("verdict.json"), &report)?;
    Ok(RunOutcome { report, output, dir })
}

/// Runs the suite without touching the file system.
pub fn compute(cfg: &SuiteConfig, opts: &RunOptions) -> Result<SuiteOutput> {
    let ctx = Ctx { cfg, opts };
    let mut out = SuiteOutput::default();
    match cfg.suite.as_str() {
        "constants" => basic::constants(&ctx, &mut out)?,
        "halfspace-identity" => basic::halfspace_identity(&ctx, &mut out)?,
        "profile" => basic::profile(&ctx, &mut out)?,
        "potential-limit" => basic::potential_limit(&ctx, &mut out)?,
        "exact-identities" => basic::exact_identities(&ctx, &mut out)?,
        "n-exponents" => curved::n_exponents(&ctx, &mut out)?,
        "fermi-expansion" => curved::fermi_expansion(&ctx, &mut out)?,
        "willmore-vanishing" => curved::willmore_vanishing(&ctx, &mut out)?,
        "gamma-limsup-d1" => limsup::gamma_limsup_d1(&ctx, &mut out)?,
        "perimeters" => perimeters::perimeters(&ctx, &mut out)?,
        other => return Err(CliError::Config(format!("no runner for suite {other:?}"))),
    }
    if out.checks.is_empty() {
        return Err(CliError::Config(format!("suite {:?} produced no checks for this config", cfg.suite)));
    }
    Ok(out)
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Slope of `log |y|` against `log x`.
pub(crate) fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    slope(&x, &y)
}
