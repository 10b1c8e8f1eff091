//! Flat `key = value` configuration files. Blank lines and lines starting
//! with `#` are ignored; keys use the long flag names.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

#[derive(Debug, Default)]
pub struct FlatConfig {
    values: BTreeMap<String, String>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::domain(format!("config line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('_', "-");
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Failure::domain(format!("config line {}: duplicate key {key}", i + 1)));
            }
        }
        Ok(FlatConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        Self::parse(&text)
    }

    /// The flag value if given, else the parsed file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| v.parse().map_err(|e| Failure::domain(format!("config key {key}: {e}"))))
            .transpose()
    }

    /// Comma-separated list value, with the same precedence as [`pick`].
    pub fn pick_list<T>(&self, flag: &[T], key: &str) -> Result<Vec<T>, Failure>
    where
        T: Clone + FromStr,
        T::Err: std::fmt::Display,
    {
        if !flag.is_empty() {
            return Ok(flag.to_vec());
        }
        let Some(text) = self.values.get(key) else { return Ok(Vec::new()) };
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| Failure::domain(format!("config key {key}: {e}"))))
            .collect()
    }

    pub fn unknown_keys<'a>(&'a self, known: &'a [&str]) -> impl Iterator<Item = &'a str> {
        self.values.keys().map(String::as_str).filter(|k| !known.contains(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_take_precedence() {
        let cfg = FlatConfig::parse("# campaign\nn = 30\np=0.5\nseeds = 1, 2,3\n").unwrap();
        assert_eq!(cfg.pick::<usize>(None, "n").unwrap(), Some(30));
        assert_eq!(cfg.pick(Some(8usize), "n").unwrap(), Some(8));
        assert_eq!(cfg.pick_list::<u64>(&[], "seeds").unwrap(), vec![1, 2, 3]);
        assert_eq!(cfg.pick::<u64>(None, "budget").unwrap(), None);
        assert!(cfg.pick::<usize>(None, "p").is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(FlatConfig::parse("n 30").is_err());
        assert!(FlatConfig::parse("n = 1\nn = 2").is_err());
    }
}
