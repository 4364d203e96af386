//! Runs every acceptance criterion from the shipped configs at full resolution
//! and prints one PASS/FAIL line per criterion.
//!
//! AC-7 and AC-8 fail at their stated thresholds; README.md records the
//! measured values and why they are not reachable with these ladders. The
//! target asserts that exactly these two fail, so a regression anywhere else,
//! or either of them starting to pass, turns the run red.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fracfield::{run_suite, RunOptions, SuiteConfig, CACHE_ENV};

const CONFIGS: &[&str] = &[
    "constants",
    "halfspace-identity",
    "profile",
    "potential-limit",
    "exact-identities",
    "n-exponents",
    "fermi-expansion",
    "willmore-vanishing",
    "gamma-limsup-d1",
    "gamma-limsup-d1-s03",
    "perimeters",
];

const KNOWN_FAILURES: &[&str] = &["AC-7", "AC-8"];

fn criterion_key(id: &str) -> u32 {
    id.trim_start_matches("AC-").parse().unwrap_or(u32::MAX)
}

fn main() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let output = tempfile::tempdir().unwrap();
    // Profiles are expensive and deterministic; keep them across test runs.
    let cache = std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_TARGET_TMPDIR")).join("profile-cache"));
    let opts = RunOptions { coarse: false, cache_dir: Some(cache) };

    // criterion number -> (id, pass, failure details)
    let mut verdicts: BTreeMap<u32, (String, bool, Vec<String>)> = BTreeMap::new();
    for name in CONFIGS {
        let mut cfg = SuiteConfig::load(&configs.join(format!("{name}.toml"))).unwrap();
        cfg.output_dir = output.path().to_path_buf();
        let clock = std::time::Instant::now();
        match run_suite(&cfg, &opts) {
            Ok(run) => {
                println!("{name}: {:.1} s", clock.elapsed().as_secs_f64());
                for c in &run.report.checks {
                    let slot = verdicts.entry(criterion_key(&c.id)).or_insert_with(|| (c.id.clone(), true, vec![]));
                    slot.1 &= c.pass;
                    if !c.pass {
                        slot.2.push(format!("{}: measured {:.4e}, expected {:.4e}", c.name, c.measured, c.expected));
                    }
                }
            }
            Err(err) => {
                let entry = fracfield::catalog::find(&cfg.suite).unwrap();
                for id in entry.criteria {
                    let slot = verdicts.entry(criterion_key(id)).or_insert_with(|| (id.to_string(), true, vec![]));
                    slot.1 = false;
                    slot.2.push(format!("{name}: {err}"));
                }
            }
        }
    }

    let mut failed = vec![];
    for (id, pass, details) in verdicts.values() {
        println!("{id} {}", if *pass { "PASS" } else { "FAIL" });
        for d in details {
            println!("    {d}");
        }
        if !pass {
            failed.push(id.as_str());
        }
    }
    let expected: Vec<String> = (1..=11).map(|k| format!("AC-{k}")).collect();
    let seen: Vec<&String> = verdicts.values().map(|v| &v.0).collect();
    assert_eq!(seen, expected.iter().collect::<Vec<_>>(), "every criterion must be exercised");
    assert_eq!(failed, KNOWN_FAILURES, "failing criteria differ from the documented set");
}
