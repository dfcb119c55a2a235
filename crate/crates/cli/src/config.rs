use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Keys accepted in a config file; they mirror the long flags.
pub const KEYS: [&str; 13] = [
    "dim",
    "mu",
    "L",
    "method",
    "alpha",
    "beta",
    "gamma",
    "optimal",
    "iters",
    "seed",
    "out",
    "samples",
    "tolerance",
];

/// Flat `key = value` settings with `#` comments.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                bail!("line {}: unknown key `{key}`", n + 1);
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow!("config key `{key}`: {e}"))
            })
            .transpose()
    }

    /// Comma-separated list value.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        item.trim()
                            .parse::<T>()
                            .map_err(|e| anyhow!("config key `{key}`: {e}"))
                    })
                    .collect()
            })
            .transpose()
    }
}
