use std::path::Path;
use std::process::Command;

use fracfield::catalog::{self, SUITES};
use fracfield::{compute, run_suite, CliError, RunOptions, SuiteConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracfield"))
}

fn shipped(name: &str) -> SuiteConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"));
    SuiteConfig::load(&path).unwrap()
}

#[test]
fn catalog_lists_every_suite() {
    assert!(SUITES.len() >= 10);
    for name in ["fermi-expansion", "gamma-limsup-d1", "perimeters", "constants"] {
        assert!(catalog::find(name).is_some(), "{name} missing");
    }
    let mut names = catalog::names();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), SUITES.len(), "suite names must be unique");

    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), SUITES.len());
    assert!(text.contains("fermi-expansion") && text.contains("gamma-limsup-d1"));
}

#[test]
fn unknown_suite_is_a_config_error() {
    let err =
        SuiteConfig::parse("suite = \"nope\"\noutput_dir = \"x\"\nrel_tol = 1e-8\nabs_tol = 1e-12\n").unwrap_err();
    let CliError::Config(msg) = err else { panic!("expected a config error, got {err:?}") };
    assert!(msg.contains("fermi-expansion"), "the message lists the available suites: {msg}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "suite = \"constants\"\n").unwrap();
    let out = bin().args(["run", "nope", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown suite") && err.contains("perimeters"), "{err}");
}

#[test]
fn config_validation() {
    let base =
        "suite = \"constants\"\noutput_dir = \"runs\"\nrel_tol = 1e-8\nabs_tol = 1e-12\npotential = \"quartic\"\n";
    assert!(SuiteConfig::parse(base).is_ok());
    let bad = [
        format!("{base}s = [0.3]\n"),
        base.replace("rel_tol = 1e-8", "rel_tol = 0.0"),
        base.replace("output_dir = \"runs\"", "output_dir = \"\""),
        base.replace("suite = \"constants\"\n", ""),
        format!("{base}[extra]\nkey = 1\n"),
        "suite = ".to_string(),
    ];
    for text in &bad {
        assert!(matches!(SuiteConfig::parse(text), Err(CliError::Config(_))), "accepted:\n{text}");
    }
}

#[test]
fn typed_getters() {
    let cfg = SuiteConfig::parse(
        "suite = \"profile\"\noutput_dir = \"o\"\nrel_tol = 1e-8\nabs_tol = 1e-12\ns = [0.3, \"1/2\", 1]\neps = [1, 0.5]\n",
    )
    .unwrap();
    assert_eq!(cfg.numbers("eps").unwrap(), vec![1.0, 0.5]);
    assert!(cfg.orders("s").is_err(), "1 is not a fractional order");
    assert!(matches!(cfg.number("points"), Err(CliError::Config(m)) if m.contains("points")));
    let cfg = SuiteConfig::parse(
        "suite = \"profile\"\noutput_dir = \"o\"\nrel_tol = 1e-8\nabs_tol = 1e-12\ns = [0.3, \"1/2\"]\n",
    )
    .unwrap();
    let orders = cfg.orders("s").unwrap();
    assert_eq!(orders[1].ratio(), Some((1, 2)));
}

#[test]
fn a_suite_without_checks_is_rejected() {
    let cfg = SuiteConfig::parse(
        "suite = \"halfspace-identity\"\noutput_dir = \"o\"\nrel_tol = 1e-9\nabs_tol = 1e-14\ns = []\ndistances = [1.0]\n",
    )
    .unwrap();
    assert!(matches!(compute(&cfg, &RunOptions::default()), Err(CliError::Config(_))));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = vec![];
    for entry in std::fs::read_dir(dir).unwrap() {
        let cfg = SuiteConfig::load(&entry.unwrap().path()).unwrap();
        seen.push(cfg.suite);
    }
    for e in SUITES {
        assert!(seen.iter().any(|s| s == e.name), "no shipped config for {}", e.name);
    }
}

#[test]
fn artifacts_are_written_and_reproducible() {
    let out = tempfile::tempdir().unwrap();
    let mut csvs = vec![];
    for _ in 0..2 {
        let mut cfg = shipped("perimeters");
        cfg.output_dir = out.path().to_path_buf();
        let run = run_suite(&cfg, &RunOptions::default()).unwrap();
        for file in ["results.csv", "fit.json", "verdict.json"] {
            assert!(run.dir.join(file).is_file(), "{file} missing");
        }
        let verdict: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(run.dir.join("verdict.json")).unwrap()).unwrap();
        assert_eq!(verdict["suite"], "perimeters");
        assert!(verdict["environment"]["version"].is_string());
        csvs.push(std::fs::read(run.dir.join("results.csv")).unwrap());
    }
    assert_eq!(std::fs::read_dir(out.path().join("perimeters")).unwrap().count(), 2, "runs never overwrite each other");
    assert!(csvs[0] == csvs[1], "results.csv must be byte-identical across runs");
}

#[test]
fn run_subcommand_reports_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constants.toml");
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/constants.toml")).unwrap();
    std::fs::write(
        &path,
        text.replace("output_dir = \"runs\"", &format!("output_dir = {:?}", dir.path().join("runs"))),
    )
    .unwrap();
    let out = bin().args(["run", "constants", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "AC-1 PASS"), "{text}");

    let out = bin().args(["run", "profile", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "a config for another suite is refused");
}
