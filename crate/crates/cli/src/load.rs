//! Spec loading. Every failure here maps to exit code 2.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use qgd::hopf::json::QuantumGroupSpec;
use qgd::hopf::{self, FiniteGroup, FiniteQuantumGroup};
use serde::de::DeserializeOwned;

#[derive(Debug)]
pub struct SpecError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
            if let Some(col) = self.column {
                write!(f, ":{col}")?;
            }
        }
        write!(f, ": {}", self.message)
    }
}

impl SpecError {
    pub fn plain(path: impl Into<PathBuf>, message: impl fmt::Display) -> Self {
        Self {
            path: path.into(),
            line: None,
            column: None,
            message: message.to_string(),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, SpecError> {
    let text = fs::read_to_string(path).map_err(|e| SpecError::plain(path, e))?;
    serde_json::from_str(&text).map_err(|e| SpecError {
        path: path.to_path_buf(),
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })
}

pub fn quantum_group_file(path: &Path) -> Result<FiniteQuantumGroup, SpecError> {
    let spec: QuantumGroupSpec = read_json(path)?;
    spec.build().map_err(|e| SpecError::plain(path, e))
}

pub fn builtin(name: &str) -> Result<FiniteQuantumGroup, SpecError> {
    hopf::builtin(name).map_err(|e| SpecError::plain(format!("--builtin {name}"), e))
}

/// Underlying group of `group_algebra:<G>`.
pub fn group_of(name: &str) -> Result<FiniteGroup, SpecError> {
    let arg = format!("--builtin {name}");
    let g = name
        .strip_prefix("group_algebra:")
        .ok_or_else(|| SpecError::plain(&arg, "expected a group algebra `group_algebra:<G>`"))?;
    FiniteGroup::builtin(g).map_err(|e| SpecError::plain(&arg, e))
}
