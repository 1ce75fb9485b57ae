//! Scenario files: TOML with unit-suffixed keys.

use std::fs;
use std::path::{Path, PathBuf};

use hts_core::scenario::Scenario;
use sha2::{Digest, Sha256};

use crate::error::{Result, SimError};

/// A parsed scenario plus what the runner needs to know about its file.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub path: PathBuf,
    /// Hex SHA-256 of the file bytes.
    pub digest: String,
}

impl LoadedScenario {
    /// Resolve a path written inside the scenario relative to the scenario's directory.
    pub fn resolve(&self, relative: &str) -> PathBuf {
        let p = Path::new(relative);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

/// Parse without validating.
pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = match e.span() {
            Some(span) => {
                let (l, c) = line_col(text, span.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        SimError::Parse {
            path: path.to_path_buf(),
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

/// Read and parse a scenario file; does not validate.
pub fn read_scenario(path: &Path) -> Result<LoadedScenario> {
    let bytes = fs::read(path).map_err(|e| SimError::io(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| SimError::parse(path, None, format!("not UTF-8: {e}")))?;
    let scenario = parse_scenario(text, path)?;
    Ok(LoadedScenario {
        scenario,
        path: path.to_path_buf(),
        digest: sha256_hex(&bytes),
    })
}

/// Read, parse and validate; every invariant violation is reported.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario> {
    let loaded = read_scenario(path)?;
    let issues = loaded.scenario.diagnostics();
    if issues.is_empty() {
        Ok(loaded)
    } else {
        Err(SimError::Validation(issues))
    }
}

pub fn to_toml(scenario: &Scenario) -> String {
    toml::to_string(scenario).expect("scenario types serialize to TOML")
}
