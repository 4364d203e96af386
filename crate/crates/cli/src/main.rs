use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracfield::catalog::SUITES;
use fracfield::{run_suite, CliError, RunOptions, SuiteConfig, CACHE_ENV};
use fracfield_core::foundations::{FracOrder, PotentialSpec};
use fracfield_core::profile::{cached_profile, ProfileGrid};

#[derive(Parser)]
#[command(name = "fracfield", version, about = "Numerical suites for nonlocal Allen-Cahn energies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve (or load from $FRACFIELD_CACHE) the optimal profile and print its diagnostics.
    SolveProfile {
        /// Fractional order, as a decimal or `p/q`.
        #[arg(long)]
        s: FracOrder,
        /// Truncation radius of the profile grid.
        #[arg(long = "Z", default_value_t = ProfileGrid::default().z_max)]
        z_max: f64,
        /// Grid spacing.
        #[arg(long, default_value_t = ProfileGrid::default().h)]
        h: f64,
        /// Residual tolerance of the solver.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Also write the profile in its text format to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite from its config file.
    Run {
        suite: String,
        #[arg(long)]
        config: PathBuf,
        /// Widen quadrature tolerances 3x and drop the finest ladder rung.
        #[arg(long)]
        coarse: bool,
    },
    /// List the suites with the statement each checks.
    List,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(failures) => ExitCode::from(failures.min(255) as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

/// Returns the number of failed criteria.
fn run(cli: Cli) -> Result<usize, CliError> {
    match cli.command {
        Command::List => {
            for e in SUITES {
                println!("{:<20} {:<12} {}", e.name, e.criteria.join(","), e.anchor);
            }
            Ok(0)
        }
        Command::SolveProfile { s, z_max, h, tol, out } => {
            let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
            let grid = ProfileGrid { z_max, h };
            let p = cached_profile(cache.as_deref(), s, &PotentialSpec::quartic(), grid, tol)?;
            let d = p.verify();
            let summary = serde_json::json!({
                "s": s.value(),
                "z_max": z_max,
                "h": h,
                "residual_sup": d.residual_sup,
                "tail_match": d.tail_match,
                "decay_constant": d.decay_constant,
                "tail_coeff": p.tail_coeff(),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if let Some(path) = out {
                std::fs::write(&path, p.to_text())
                    .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            }
            Ok(0)
        }
        Command::Run { suite, config, coarse } => {
            if fracfield::catalog::find(&suite).is_none() {
                let names = fracfield::catalog::names().join(", ");
                return Err(CliError::Config(format!("unknown suite {suite:?}; available suites: {names}")));
            }
            let cfg = SuiteConfig::load(&config)?;
            if cfg.suite != suite {
                return Err(CliError::Config(format!(
                    "config {} is for suite {:?}, not {suite:?}",
                    config.display(),
                    cfg.suite
                )));
            }
            let outcome = run_suite(&cfg, &RunOptions::from_env(coarse))?;
            for c in &outcome.report.checks {
                let tag = if c.pass { "ok  " } else { "FAIL" };
                println!(
                    "{tag} {} {}: measured {:.6e}, expected {:.6e}, tolerance {:.1e}",
                    c.id, c.name, c.measured, c.expected, c.tolerance
                );
            }
            for v in &outcome.report.criteria {
                println!("{} {}{}", v.id, if v.pass { "PASS" } else { "FAIL" }, if coarse { " (coarse)" } else { "" });
            }
            println!("artifacts: {}", outcome.dir.display());
            Ok(outcome.report.failures())
        }
    }
}
