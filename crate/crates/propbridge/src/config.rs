//! Versionable run configuration files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::Value;
use thiserror::Error;

use crate::runner::Backend;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: malformed JSON: {message}")]
    Malformed { path: String, message: String },
    #[error("{path}: unknown key: {key}")]
    UnknownKey { path: String, key: String },
    #[error("{path}: key {key}: expected {expected}")]
    TypeMismatch {
        path: String,
        key: String,
        expected: &'static str,
    },
}

impl ConfigError {
    pub(crate) fn io(path: &Path, e: io::Error) -> Self {
        ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

/// Settings read from a config file. Every field is optional; flags given on
/// the command line win over these.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub backend: Option<Backend>,
    pub seed: Option<u64>,
    pub cases: Option<u64>,
    pub budget: Option<u64>,
    pub timeout_ms: Option<u64>,
    pub filter: Option<String>,
    pub report: Option<PathBuf>,
    pub history: Option<PathBuf>,
    pub waivers: Option<PathBuf>,
    pub strict: Option<bool>,
    pub repetition_cap: Option<u32>,
    pub code_fingerprint: Option<String>,
}

fn field<T: DeserializeOwned>(
    path: &str,
    key: &str,
    v: &Value,
    expected: &'static str,
) -> Result<Option<T>, ConfigError> {
    serde_json::from_value(v.clone())
        .map(Some)
        .map_err(|_| ConfigError::TypeMismatch {
            path: path.into(),
            key: key.into(),
            expected,
        })
}

pub fn parse_config(text: &str, path: &str) -> Result<ConfigFile, ConfigError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ConfigError::Malformed {
        path: path.into(),
        message: e.to_string(),
    })?;
    let Value::Object(map) = doc else {
        return Err(ConfigError::Malformed {
            path: path.into(),
            message: "expected a JSON object".into(),
        });
    };
    let mut c = ConfigFile::default();
    for (key, v) in &map {
        let k = key.as_str();
        match k {
            "backend" => {
                let name: Option<String> = field(path, k, v, "a backend name")?;
                let b = name
                    .map(|n| n.parse::<Backend>())
                    .transpose()
                    .map_err(|_| ConfigError::TypeMismatch {
                        path: path.into(),
                        key: key.clone(),
                        expected: "one of fuzz, exhaustive, symbolic, ensemble",
                    })?;
                c.backend = b;
            }
            "seed" => c.seed = field(path, k, v, "an unsigned 64-bit integer")?,
            "cases" => c.cases = field(path, k, v, "an unsigned integer")?,
            "budget" => c.budget = field(path, k, v, "an unsigned integer")?,
            "timeout_ms" => c.timeout_ms = field(path, k, v, "an unsigned integer")?,
            "filter" => c.filter = field(path, k, v, "a string")?,
            "report" => c.report = field(path, k, v, "a path string")?,
            "history" => c.history = field(path, k, v, "a path string")?,
            "waivers" => c.waivers = field(path, k, v, "a path string")?,
            "strict" => c.strict = field(path, k, v, "a boolean")?,
            "repetition_cap" => c.repetition_cap = field(path, k, v, "an unsigned 32-bit integer")?,
            "code_fingerprint" => c.code_fingerprint = field(path, k, v, "a string")?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    path: path.into(),
                    key: key.clone(),
                })
            }
        }
    }
    Ok(c)
}

pub fn load_config(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_keys() {
        let c = parse_config(r#"{"backend":"ensemble","timeout_ms":5000}"#, "c.json").unwrap();
        assert_eq!(c.backend, Some(Backend::Ensemble));
        assert_eq!(c.timeout_ms, Some(5000));
        assert_eq!(c.cases, None);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config(r#"{"backnd":"fuzz"}"#, "c.json").unwrap_err();
        assert_eq!(e.to_string(), "c.json: unknown key: backnd");
    }

    #[test]
    fn type_mismatch_names_key() {
        let e = parse_config(r#"{"cases":"many"}"#, "c.json").unwrap_err();
        assert!(e.to_string().contains("key cases"), "{e}");
        let e = parse_config(r#"{"backend":"klee"}"#, "c.json").unwrap_err();
        assert!(matches!(e, ConfigError::TypeMismatch { .. }));
        assert!(matches!(
            parse_config("[1]", "c"),
            Err(ConfigError::Malformed { .. })
        ));
        assert!(matches!(
            parse_config("{", "c"),
            Err(ConfigError::Malformed { .. })
        ));
    }
}
