//! Analyzer configuration: defaults, flat key-value config files, and
//! the knobs shared across pipeline stages.

use crate::findings::DefectKind;
use crate::reasoner::{BackendConfig, BackendKind};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const DEFAULT_BATCH_SIZE: usize = 10;
pub const DEFAULT_MAX_FILE_BYTES: u64 = 1024 * 1024;

/// Directory names skipped during project discovery, in addition to any
/// hidden directory (leading dot).
pub const DEFAULT_EXCLUDED_DIRS: &[&str] = &[
    "__pycache__",
    "venv",
    "virtualenv",
    "env",
    "build",
    "dist",
    "node_modules",
    "site-packages",
    "testdata",
    "test_fixtures",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Markdown,
    Both,
}

#[derive(Debug, Clone)]
pub struct AnalyzerConfig {
    pub backend: BackendConfig,
    /// Reasoner batch size; also the layered-search grouping size.
    pub batch_size: usize,
    /// Oracles to execute; defaults to all eight.
    pub enabled: BTreeSet<DefectKind>,
    /// Report unknown model capabilities as warnings instead of staying
    /// silent.
    pub strict: bool,
    pub dump_graph: bool,
    pub dump_unrt: bool,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    /// Extra ignore globs, merged with `<root>/.agentlintignore`.
    pub ignore_globs: Vec<String>,
    /// Directory names to skip during discovery.
    pub excluded_dirs: Vec<String>,
    pub max_file_bytes: u64,
    /// Override for the bundled heuristic marker data file.
    pub markers_path: Option<PathBuf>,
    /// Override for the bundled model capability registry.
    pub registry_path: Option<PathBuf>,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig {
            backend: BackendConfig::heuristic(),
            batch_size: DEFAULT_BATCH_SIZE,
            enabled: DefectKind::ALL.iter().copied().collect(),
            strict: false,
            dump_graph: false,
            dump_unrt: false,
            out_dir: PathBuf::from("./agentlint-out"),
            format: OutputFormat::Both,
            ignore_globs: Vec::new(),
            excluded_dirs: DEFAULT_EXCLUDED_DIRS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            max_file_bytes: DEFAULT_MAX_FILE_BYTES,
            markers_path: None,
            registry_path: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: invalid value for {key}: {value:?}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
}

impl AnalyzerConfig {
    /// Applies a flat `key = value` config file on top of `self`.
    /// Later CLI flags are expected to override these values in turn.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: line_no,
                text: raw.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let invalid = |k: &str, v: &str| ConfigError::InvalidValue {
                line: line_no,
                key: k.to_string(),
                value: v.to_string(),
            };
            match key {
                "backend" => {
                    self.backend.kind = match value {
                        "heuristic" => BackendKind::Heuristic,
                        "remote" => BackendKind::Remote,
                        _ => return Err(invalid(key, value)),
                    };
                }
                "endpoint" => self.backend.endpoint = Some(value.to_string()),
                "model" => self.backend.model = Some(value.to_string()),
                "api_key_env" => self.backend.api_key_env = Some(value.to_string()),
                "max_retries" => {
                    self.backend.max_retries = value.parse().map_err(|_| invalid(key, value))?;
                }
                "parallelism" => {
                    self.backend.parallelism = value.parse().map_err(|_| invalid(key, value))?;
                }
                "timeout_secs" => {
                    self.backend.timeout_secs = value.parse().map_err(|_| invalid(key, value))?;
                }
                "n" => {
                    let n: usize = value.parse().map_err(|_| invalid(key, value))?;
                    if n == 0 {
                        return Err(invalid(key, value));
                    }
                    self.batch_size = n;
                }
                "only" => {
                    let mut set = BTreeSet::new();
                    for part in value.split(',').filter(|p| !p.trim().is_empty()) {
                        let kind =
                            DefectKind::parse(part).ok_or_else(|| invalid(key, part.trim()))?;
                        set.insert(kind);
                    }
                    self.enabled = set;
                }
                "strict" => self.strict = parse_bool(value).ok_or_else(|| invalid(key, value))?,
                "dump_graph" => {
                    self.dump_graph = parse_bool(value).ok_or_else(|| invalid(key, value))?
                }
                "dump_unrt" => {
                    self.dump_unrt = parse_bool(value).ok_or_else(|| invalid(key, value))?
                }
                "out" => self.out_dir = PathBuf::from(value),
                "format" => {
                    self.format = match value {
                        "json" => OutputFormat::Json,
                        "md" => OutputFormat::Markdown,
                        "both" => OutputFormat::Both,
                        _ => return Err(invalid(key, value)),
                    };
                }
                "ignore" => {
                    self.ignore_globs
                        .extend(value.split(',').map(|g| g.trim().to_string()));
                }
                "exclude_dirs" => {
                    self.excluded_dirs = value.split(',').map(|d| d.trim().to_string()).collect();
                }
                "max_file_bytes" => {
                    self.max_file_bytes = value.parse().map_err(|_| invalid(key, value))?;
                }
                "markers_file" => self.markers_path = Some(PathBuf::from(value)),
                "registry_file" => self.registry_path = Some(PathBuf::from(value)),
                other => {
                    return Err(ConfigError::UnknownKey {
                        line: line_no,
                        key: other.to_string(),
                    })
                }
            }
        }
        Ok(())
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_enable_all_oracles() {
        let cfg = AnalyzerConfig::default();
        assert_eq!(cfg.enabled.len(), 8);
        assert_eq!(cfg.batch_size, 10);
    }

    #[test]
    fn config_file_overrides() {
        let mut cfg = AnalyzerConfig::default();
        cfg.apply_text("# comment\nbackend = remote\nn = 5\nonly = EPDD, ALS\nstrict = true\n")
            .unwrap();
        assert_eq!(cfg.backend.kind, BackendKind::Remote);
        assert_eq!(cfg.batch_size, 5);
        assert_eq!(cfg.enabled.len(), 2);
        assert!(cfg.strict);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut cfg = AnalyzerConfig::default();
        assert!(matches!(
            cfg.apply_text("bogus = 1"),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            cfg.apply_text("n = zero"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            cfg.apply_text("n = 0"),
            Err(ConfigError::InvalidValue { .. })
        ));
    }
}
