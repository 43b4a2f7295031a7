//! Run configuration assembled from flags and an optional JSON file.
//!
//! The file is a flat object whose keys are the long flag names, for example
//! `{"a": 2, "b": 1, "beta0": 0.3, "m-max": 5}`. A flag given on the command
//! line wins over the same key in the file.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: Map<String, Value>,
    source: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, Some(path.to_path_buf()))
    }

    pub fn parse(text: &str, source: Option<PathBuf>) -> Result<Self, CliError> {
        let name = source.as_ref().map_or("config".to_string(), |p| p.display().to_string());
        match serde_json::from_str(text) {
            Ok(Value::Object(values)) => Ok(FileConfig { values, source }),
            Ok(_) => Err(CliError::Domain(format!("{name}: expected a JSON object"))),
            Err(e) => Err(CliError::Domain(format!("{name}: {e}"))),
        }
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| {
                let name = self.source.as_ref().map_or("config".to_string(), |p| p.display().to_string());
                CliError::Domain(format!("{name}: key {key:?}: {e}"))
            }),
        }
    }

    /// The flag value if given, else the file value, else `default`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Like [`FileConfig::pick_opt`], but reports a missing value.
    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.pick_opt(flag, key)?.ok_or_else(|| CliError::Domain(format!("missing --{key} (flag or config key)")))
    }
}
