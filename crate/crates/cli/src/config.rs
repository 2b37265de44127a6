//! Key=value config files: one `key = value` or `key=value` pair per
//! line, `#` comments allowed. Keys match the long CLI flag names;
//! explicit CLI flags win over config values.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

const KNOWN_KEYS: &[&str] = &[
    "format",
    "algo",
    "phi",
    "omega",
    "min-clique",
    "seed",
    "out",
    "threads",
    "expect-nodes",
    "expect-edges",
    "cover",
    "bins",
];

#[derive(Debug, Default)]
pub struct ConfigOverrides {
    values: HashMap<String, String>,
}

impl ConfigOverrides {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigOverrides::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("failed to read config file {}", path.display()))?;
        let mut values = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected key=value, got {:?}",
                    path.display(),
                    i + 1,
                    line
                );
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!(
                    "{}:{}: unknown config key {:?} (known: {})",
                    path.display(),
                    i + 1,
                    key,
                    KNOWN_KEYS.join(", ")
                );
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigOverrides { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// CLI value if given, else the parsed config value, else none.
    pub fn resolve<T: std::str::FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.get(key) {
            Some(raw) => match raw.parse() {
                Ok(v) => Ok(Some(v)),
                Err(e) => bail!("config key {key}={raw:?}: {e}"),
            },
            None => Ok(None),
        }
    }

    pub fn resolve_path(&self, cli: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        cli.or_else(|| self.get(key).map(PathBuf::from))
    }
}
