//! Flat `key=value` run configuration.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::stats::config_digest;

/// Keys accepted in a config file or as flags.
pub const KEYS: &[&str] = &[
    "dim", "alpha", "alphas", "j", "replicates", "seed", "jobs", "out", "format", "scales",
    "epsilon", "edge", "variant", "r", "gaps", "rmin", "rmax", "mc-points", "origin", "t",
];

/// Keys that steer where or how fast a run happens but not what it computes.
const NON_CANONICAL: &[&str] = &["jobs", "out"];

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: idx + 1, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(parse_err(format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(parse_err(format!("empty value for `{key}`")));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(parse_err(format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

/// Comma-separated reals; every entry must parse and be finite.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    let values = s
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::arg(format!("`{item}` is not a finite real")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values)
}

/// Merged configuration with typed, recording accessors. Every value read
/// (including defaults) lands in the canonical map that is hashed and
/// echoed in JSON output.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    subcommand: String,
    values: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl RunConfig {
    /// `file` values first, `flags` on top.
    pub fn merge(
        subcommand: &str,
        file: BTreeMap<String, String>,
        flags: impl IntoIterator<Item = (&'static str, Option<String>)>,
    ) -> Self {
        let mut values = file;
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Self {
            subcommand: subcommand.to_string(),
            values,
            used: BTreeMap::new(),
        }
    }

    pub fn subcommand(&self) -> &str {
        &self.subcommand
    }

    fn record(&mut self, key: &str, canonical: String) {
        self.used.insert(key.to_string(), canonical);
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| Error::arg(format!("invalid value `{s}` for `{key}`")))
            })
            .transpose()
    }

    pub fn uint(&mut self, key: &str, default: Option<u64>) -> Result<u64> {
        let v = self
            .parsed::<u64>(key)?
            .or(default)
            .ok_or_else(|| Error::arg(format!("missing required `--{key}`")))?;
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn real(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        let v = self
            .parsed::<f64>(key)?
            .or(default)
            .ok_or_else(|| Error::arg(format!("missing required `--{key}`")))?;
        if !v.is_finite() {
            return Err(Error::arg(format!("`{key}` must be finite")));
        }
        self.record(key, format!("{v:?}"));
        Ok(v)
    }

    pub fn reals(&mut self, key: &str, default: Option<&[f64]>) -> Result<Vec<f64>> {
        let v = match self.raw(key) {
            Some(s) => parse_real_list(s)?,
            None => default
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::arg(format!("missing required `--{key}`")))?,
        };
        self.record(key, v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","));
        Ok(v)
    }

    pub fn text(&mut self, key: &str, default: Option<&str>) -> Result<String> {
        let v = self
            .raw(key)
            .or(default)
            .ok_or_else(|| Error::arg(format!("missing required `--{key}`")))?
            .to_string();
        self.record(key, v.clone());
        Ok(v)
    }

    pub fn flag(&mut self, key: &str) -> Result<bool> {
        let v = match self.raw(key) {
            None => false,
            Some("true") => true,
            Some("false") => false,
            Some(s) => return Err(Error::arg(format!("`{key}` expects true or false, got `{s}`"))),
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    /// Worker count and destination are read without entering the canonical
    /// map.
    pub fn jobs(&self) -> Result<usize> {
        Ok(self.parsed::<usize>("jobs")?.unwrap_or(1))
    }

    pub fn out(&self) -> Option<&str> {
        self.raw("out")
    }

    /// Subcommand plus every value read so far, sorted by key.
    pub fn canonical(&self) -> BTreeMap<String, String> {
        let mut map: BTreeMap<String, String> = self
            .used
            .iter()
            .filter(|(k, _)| !NON_CANONICAL.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        map.insert("subcommand".to_string(), self.subcommand.clone());
        map
    }

    pub fn digest(&self) -> String {
        let pairs: Vec<(String, String)> = self.canonical().into_iter().collect();
        config_digest(&pairs)
    }
}
