//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    File { path: String, line: usize },
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{path}:{line}"),
            Origin::Override => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Parsed key/value pairs; later sources override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, Entry>,
}

fn split_pair(raw: &str) -> Option<(&str, &str)> {
    let (k, v) = raw.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return None;
    }
    Some((k, v))
}

impl KeyValues {
    pub fn parse(text: &str, path: &str) -> Result<Self, CliError> {
        let mut kv = KeyValues::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = split_pair(content).ok_or_else(|| {
                CliError::Config(format!(
                    "{path}:{line}: expected `key = value`, got `{content}`"
                ))
            })?;
            let origin = Origin::File {
                path: path.to_string(),
                line,
            };
            if let Some(prev) = kv.entries.get(k) {
                return Err(CliError::Config(format!(
                    "{origin}: key `{k}` already set at {}",
                    prev.origin
                )));
            }
            kv.entries.insert(
                k.to_string(),
                Entry {
                    value: v.to_string(),
                    origin,
                },
            );
        }
        Ok(kv)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn set(&mut self, pair: &str) -> Result<(), CliError> {
        let (k, v) = split_pair(pair).ok_or_else(|| {
            CliError::Config(format!("--set: expected `key=value`, got `{pair}`"))
        })?;
        self.set_value(k, v);
        Ok(())
    }

    pub fn set_value(&mut self, key: &str, value: &str) {
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                origin: Origin::Override,
            },
        );
    }

    /// Rejects keys the subcommand does not understand.
    pub fn check_keys(&self, subcommand: &str, allowed: &[&str]) -> Result<(), CliError> {
        for (k, e) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Config(format!(
                    "{}: unknown key `{k}` for `{subcommand}` (known: {})",
                    e.origin,
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn diagnostic(&self, key: &str, msg: impl fmt::Display) -> CliError {
        match self.entries.get(key) {
            Some(e) => CliError::Config(format!("{}: key `{key}`: {msg}", e.origin)),
            None => CliError::Config(format!("key `{key}`: {msg}")),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                self.diagnostic(
                    key,
                    format!("cannot parse `{}` as {}", e.value, short_type::<T>()),
                )
            }),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Finite float, optionally constrained.
    pub fn float(&self, key: &str, default: f64, check: Check) -> Result<f64, CliError> {
        let x = self.get_or::<f64>(key, default)?;
        check.apply(x).map_err(|m| self.diagnostic(key, m))?;
        Ok(x)
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        let Some(raw) = self.get_str(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|s| {
                s.trim().parse::<T>().map_err(|_| {
                    self.diagnostic(key, format!("cannot parse list item `{}`", s.trim()))
                })
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }

    pub fn invalid(&self, key: &str, msg: impl fmt::Display) -> CliError {
        self.diagnostic(key, msg)
    }
}

fn short_type<T>() -> &'static str {
    let name = std::any::type_name::<T>();
    name.rsplit("::").next().unwrap_or(name)
}

#[derive(Debug, Clone, Copy)]
pub enum Check {
    Finite,
    Positive,
    NonNegative,
}

impl Check {
    fn apply(self, x: f64) -> Result<(), &'static str> {
        if !x.is_finite() {
            return Err("value must be finite");
        }
        match self {
            Check::Finite => Ok(()),
            Check::Positive if x > 0.0 => Ok(()),
            Check::Positive => Err("value must be positive"),
            Check::NonNegative if x >= 0.0 => Ok(()),
            Check::NonNegative => Err("value must be non-negative"),
        }
    }
}

/// `start:stop:points(log|lin)`, e.g. `0.01:100:41log`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("grid `{s}` is not of the form start:stop:points(log|lin)");
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [start, stop, tail] = parts.as_slice() else {
            return Err(bad());
        };
        let (count, log) = if let Some(c) = tail.strip_suffix("log") {
            (c, true)
        } else if let Some(c) = tail.strip_suffix("lin") {
            (c, false)
        } else {
            (*tail, false)
        };
        let start: f64 = start.trim().parse().map_err(|_| bad())?;
        let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
        let points: usize = count.trim().parse().map_err(|_| bad())?;
        if !start.is_finite() || !stop.is_finite() || points == 0 {
            return Err(bad());
        }
        if log && (start <= 0.0 || stop <= 0.0) {
            return Err(format!("log grid `{s}` needs positive endpoints"));
        }
        Ok(GridSpec {
            start,
            stop,
            points,
            log,
        })
    }
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        esrad::numeric::grid(self.start, self.stop, self.points, self.log)
    }
}
