//! Suite configuration: a flat TOML table. Every physics parameter is read
//! from the file; a suite reports a missing key instead of assuming a value.

use std::path::{Path, PathBuf};

use fracfield_core::foundations::FracOrder;
use serde::Serialize;
use toml::{Table, Value};

use crate::catalog;
use crate::error::{CliError, Result};

/// Keys every suite accepts.
pub const COMMON_KEYS: &[&str] = &["suite", "output_dir", "rel_tol", "abs_tol"];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub suite: String,
    pub output_dir: PathBuf,
    pub rel_tol: f64,
    pub abs_tol: f64,
    values: Table,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let values: Table = text.parse().map_err(|e: toml::de::Error| config_err(e.message().to_string()))?;
        for (key, value) in &values {
            if matches!(value, Value::Table(_)) {
                return Err(config_err(format!("key {key:?}: nested tables are not part of the config format")));
            }
        }
        let suite = match values.get("suite") {
            Some(Value::String(s)) => s.clone(),
            _ => return Err(config_err("missing string key \"suite\"")),
        };
        let entry = catalog::find(&suite).ok_or_else(|| {
            config_err(format!("unknown suite {suite:?}; available suites: {}", catalog::names().join(", ")))
        })?;
        for key in values.keys() {
            if !COMMON_KEYS.contains(&key.as_str()) && !entry.keys.contains(&key.as_str()) {
                return Err(config_err(format!("suite {suite:?} does not use key {key:?}")));
            }
        }
        let output_dir = match values.get("output_dir") {
            Some(Value::String(s)) if !s.is_empty() => PathBuf::from(s),
            _ => return Err(config_err("missing non-empty string key \"output_dir\"")),
        };
        let mut cfg = Self { suite, output_dir, rel_tol: 0.0, abs_tol: 0.0, values };
        cfg.rel_tol = cfg.number("rel_tol")?;
        cfg.abs_tol = cfg.number("abs_tol")?;
        if !(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0) {
            return Err(config_err("quadrature tolerances must be positive"));
        }
        Ok(cfg)
    }

    fn get(&self, key: &str) -> Result<&Value> {
        self.values.get(key).ok_or_else(|| config_err(format!("suite {:?} needs key {key:?}", self.suite)))
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        as_number(self.get(key)?).ok_or_else(|| config_err(format!("key {key:?} must be a number")))
    }

    pub fn numbers(&self, key: &str) -> Result<Vec<f64>> {
        match self.get(key)? {
            Value::Array(items) => items
                .iter()
                .map(|v| as_number(v).ok_or_else(|| config_err(format!("key {key:?} must hold numbers"))))
                .collect(),
            _ => Err(config_err(format!("key {key:?} must be an array of numbers"))),
        }
    }

    pub fn integer(&self, key: &str) -> Result<u64> {
        match self.get(key)? {
            Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            _ => Err(config_err(format!("key {key:?} must be a non-negative integer"))),
        }
    }

    pub fn text(&self, key: &str) -> Result<String> {
        match self.get(key)? {
            Value::String(s) => Ok(s.clone()),
            _ => Err(config_err(format!("key {key:?} must be a string"))),
        }
    }

    /// Fractional orders, written as numbers or as `"p/q"` strings.
    pub fn orders(&self, key: &str) -> Result<Vec<FracOrder>> {
        let Value::Array(items) = self.get(key)? else {
            return Err(config_err(format!("key {key:?} must be an array of orders")));
        };
        items
            .iter()
            .map(|v| match v {
                Value::String(s) => s.parse::<FracOrder>().map_err(|e| config_err(format!("key {key:?}: {e}"))),
                other => {
                    let x = as_number(other).ok_or_else(|| config_err(format!("key {key:?} must hold orders")))?;
                    FracOrder::new(x).map_err(|e| config_err(format!("key {key:?}: {e}")))
                }
            })
            .collect()
    }

    pub fn values(&self) -> &Table {
        &self.values
    }
}

fn as_number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}
