//! Run configuration: a flat map of `key=value` parameters merged from a
//! config file and command-line flags. The same format is written to the run
//! manifest, so a manifest can be fed back with `--config` to redo a run.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Keys accepted on the command line and in config files.
pub const KEYS: &[&str] = &[
    "command",
    "sigma",
    "t1",
    "t2",
    "t",
    "x",
    "q",
    "a",
    "chi",
    "psi",
    "f",
    "g",
    "T",
    "step",
    "grid",
    "precision",
    "sieve-limit",
    "seed",
    "seeds",
    "mode",
    "sign",
    "primitive",
    "lemma",
    "a-exp",
    "tuple-size",
    "ranks",
    "jobs",
    "out",
    "format",
];

/// Keys that do not change the artifact and are left out of the manifest
/// echo; `jobs` in particular must not matter.
const RUNTIME_KEYS: &[&str] = &["jobs", "out"];

pub const DEFAULT_PRECISION: f64 = 1e-10;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value, got '{line}'", no + 1))?;
            cfg.set(k.trim(), v.trim())
                .with_context(|| format!("config line {}", no + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            bail!("unknown parameter '{key}'");
        }
        self.params.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Values of `other` override ours.
    pub fn merge(&mut self, other: RunConfig) {
        self.params.extend(other.params);
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| anyhow!("invalid value for --{key}: '{v}'")),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| anyhow!("missing required parameter --{key}"))
    }

    pub fn require_raw(&self, key: &str) -> Result<&str> {
        self.raw(key).ok_or_else(|| anyhow!("missing required parameter --{key}"))
    }

    pub fn command(&self) -> Result<&str> {
        self.raw("command").ok_or_else(|| anyhow!("no command given"))
    }

    pub fn precision(&self) -> Result<f64> {
        let p = self.get_or("precision", DEFAULT_PRECISION)?;
        if !(p > 0.0) {
            bail!("--precision must be positive");
        }
        Ok(p)
    }

    /// `key=value` lines of every parameter that affects the artifact.
    pub fn echo(&self) -> String {
        self.params
            .iter()
            .filter(|(k, _)| !RUNTIME_KEYS.contains(&k.as_str()))
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_echo_round_trip() {
        let cfg = RunConfig::parse("# sweep\ncommand = cor2\nsigma=1.5 # inline\n\nt1=1\njobs=4\n").unwrap();
        assert_eq!(cfg.raw("sigma"), Some("1.5"));
        assert_eq!(cfg.get::<f64>("t1").unwrap(), Some(1.0));
        let echo = cfg.echo();
        assert!(!echo.contains("jobs"));
        assert_eq!(RunConfig::parse(&echo).unwrap().echo(), echo);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(RunConfig::parse("bogus=1").is_err());
        assert!(RunConfig::parse("sigma").is_err());
        let cfg = RunConfig::parse("sigma=abc").unwrap();
        assert!(cfg.get::<f64>("sigma").is_err());
    }
}
