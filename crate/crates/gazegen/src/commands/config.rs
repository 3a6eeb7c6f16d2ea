//! Key-value config files whose keys mirror the long flag names; explicit
//! flags override file values, which override built-in defaults.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub trait FromToml: Sized {
    fn from_toml(value: &toml::Value) -> Option<Self>;
    fn type_name() -> &'static str;
}

impl FromToml for u64 {
    fn from_toml(value: &toml::Value) -> Option<Self> {
        value.as_integer().and_then(|v| u64::try_from(v).ok())
    }
    fn type_name() -> &'static str {
        "unsigned integer"
    }
}

impl FromToml for usize {
    fn from_toml(value: &toml::Value) -> Option<Self> {
        value.as_integer().and_then(|v| usize::try_from(v).ok())
    }
    fn type_name() -> &'static str {
        "unsigned integer"
    }
}

impl FromToml for f64 {
    fn from_toml(value: &toml::Value) -> Option<Self> {
        value
            .as_float()
            .or_else(|| value.as_integer().map(|v| v as f64))
    }
    fn type_name() -> &'static str {
        "number"
    }
}

impl FromToml for String {
    fn from_toml(value: &toml::Value) -> Option<Self> {
        value.as_str().map(str::to_string)
    }
    fn type_name() -> &'static str {
        "string"
    }
}

impl FromToml for bool {
    fn from_toml(value: &toml::Value) -> Option<Self> {
        value.as_bool()
    }
    fn type_name() -> &'static str {
        "boolean"
    }
}

impl FromToml for PathBuf {
    fn from_toml(value: &toml::Value) -> Option<Self> {
        value.as_str().map(PathBuf::from)
    }
    fn type_name() -> &'static str {
        "path string"
    }
}

/// A loaded config file plus bookkeeping of which keys were consumed, so
/// typos surface as errors instead of silently ignored settings.
pub struct FileConfig {
    path: Option<String>,
    table: toml::Table,
    consumed: BTreeSet<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig {
                path: None,
                table: toml::Table::new(),
                consumed: BTreeSet::new(),
            }),
            Some(p) => {
                let path_str = p.display().to_string();
                let text =
                    std::fs::read_to_string(p).map_err(|e| Error::io(&path_str, e))?;
                let table: toml::Table = text.parse().map_err(|e| {
                    Error::Config(format!("{path_str}: not a valid config file: {e}"))
                })?;
                Ok(FileConfig {
                    path: Some(path_str),
                    table,
                    consumed: BTreeSet::new(),
                })
            }
        }
    }

    fn file_value<T: FromToml>(&mut self, key: &str) -> Result<Option<T>> {
        self.consumed.insert(key.to_string());
        match self.table.get(key) {
            None => Ok(None),
            Some(v) => T::from_toml(v).map(Some).ok_or_else(|| {
                Error::Config(format!(
                    "{}: key '{key}' must be a {}",
                    self.path.as_deref().unwrap_or("<config>"),
                    T::type_name()
                ))
            }),
        }
    }

    /// Flag value, else file value, else default.
    pub fn resolve<T: FromToml>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        let file = self.file_value(key)?;
        Ok(flag.or(file).unwrap_or(default))
    }

    /// Flag value or file value; absence is an error.
    pub fn resolve_required<T: FromToml>(&mut self, key: &str, flag: Option<T>) -> Result<T> {
        let file = self.file_value(key)?;
        flag.or(file).ok_or_else(|| {
            Error::Config(format!(
                "missing required setting '{key}' (flag --{key} or config file key)"
            ))
        })
    }

    pub fn resolve_optional<T: FromToml>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        let file = self.file_value(key)?;
        Ok(flag.or(file))
    }

    /// Reject config keys that no resolver asked for.
    pub fn finish(self) -> Result<()> {
        let unknown: Vec<String> = self
            .table
            .keys()
            .filter(|k| !self.consumed.contains(*k))
            .cloned()
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{}: unknown keys: {}",
                self.path.as_deref().unwrap_or("<config>"),
                unknown.join(", ")
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_cfg(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_override_file_values_over_defaults() {
        let f = write_cfg("epochs = 7\nseed = 3\n");
        let mut cfg = FileConfig::load(Some(f.path())).unwrap();
        // flag wins
        assert_eq!(cfg.resolve("epochs", Some(9usize), 500).unwrap(), 9);
        // file wins over default
        assert_eq!(cfg.resolve_required::<u64>("seed", None).unwrap(), 3);
        cfg.finish().unwrap();
    }

    #[test]
    fn missing_required_is_an_error() {
        let mut cfg = FileConfig::load(None).unwrap();
        assert!(cfg.resolve_required::<u64>("seed", None).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let f = write_cfg("epcohs = 7\n");
        let mut cfg = FileConfig::load(Some(f.path())).unwrap();
        let _ = cfg.resolve("epochs", None::<usize>, 500).unwrap();
        let err = cfg.finish();
        assert!(err.is_err());
        assert!(err.unwrap_err().to_string().contains("epcohs"));
    }

    #[test]
    fn type_mismatch_rejected() {
        let f = write_cfg("epochs = \"many\"\n");
        let mut cfg = FileConfig::load(Some(f.path())).unwrap();
        assert!(cfg.resolve("epochs", None::<usize>, 500).is_err());
    }
}
