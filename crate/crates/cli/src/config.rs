//! Layered settings: command-line flag, then environment variable, then the
//! JSON config file, then the built-in default.
//!
//! Flags and environment variables are merged by clap; this module supplies
//! the config-file layer underneath them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::UsageError;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        match serde_json::from_str::<Value>(text).map_err(|e| e.to_string())? {
            Value::Object(map) => Ok(ConfigFile {
                values: map.into_iter().map(|(k, v)| (k.replace('_', "-"), v)).collect(),
            }),
            _ => Err("config must be a JSON object".into()),
        }
    }

    /// A typed value for `key`; keys may be written with dashes or underscores.
    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, UsageError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| UsageError(format!("config key {key:?}: {e}"))),
        }
    }

    /// Resolve a setting: an explicit or environment-provided value wins,
    /// then the config file, then `default`.
    pub fn resolve<T: DeserializeOwned>(&self, given: Option<T>, key: &str, default: T) -> Result<T, UsageError> {
        Ok(match given {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    pub fn resolve_opt<T: DeserializeOwned>(&self, given: Option<T>, key: &str) -> Result<Option<T>, UsageError> {
        Ok(match given {
            Some(v) => Some(v),
            None => self.get(key)?,
        })
    }
}
