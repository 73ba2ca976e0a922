//! Marker data for the heuristic backend. Agent frameworks churn, so
//! the lists live in a JSON data file bundled with the crate and can be
//! overridden per run.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const BUNDLED_MARKERS: &str = include_str!("../../data/markers.json");

#[derive(Debug, Error)]
pub enum MarkerError {
    #[error("cannot read marker file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid marker file: {0}")]
    Decode(#[from] serde_json::Error),
    #[error("invalid marker pattern {pattern:?}: {source}")]
    Pattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkerConfig {
    /// Substrings of call paths that indicate a model invocation.
    pub llm_call_markers: Vec<String>,
    /// Regexes matched against class names for LLM wrappers.
    pub llm_name_patterns: Vec<String>,
    /// Regexes matched against class names for agents.
    pub agent_name_patterns: Vec<String>,
    /// Substrings of base-class names that mark a tool class.
    pub tool_base_markers: Vec<String>,
    /// Decorator terminal names that mark a tool function.
    pub tool_decorators: Vec<String>,
    /// Conventional tool execution entry points.
    pub tool_exec_names: Vec<String>,
    /// Conventional model invocation entry points.
    pub llm_exec_names: Vec<String>,
    /// Keyword arguments carrying stop lists into a model call.
    pub stop_kwargs: Vec<String>,
    /// Keyword arguments carrying the model name.
    pub model_kwargs: Vec<String>,
    /// Keyword arguments that disable parse-error handling when false.
    pub parse_error_kwargs: Vec<String>,
    /// Substrings of attribute names treated as credentials.
    pub credential_patterns: Vec<String>,
    /// Substrings of attribute names holding tool collections.
    pub tool_collection_patterns: Vec<String>,
    /// Tokens ignored when comparing descriptions to implementations.
    pub description_stopwords: Vec<String>,
}

impl MarkerConfig {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_MARKERS).expect("bundled markers.json is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self, MarkerError> {
        let text = std::fs::read_to_string(path).map_err(|source| MarkerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn llm_name_matches(&self, name: &str) -> bool {
        regex_any(&self.llm_name_patterns, name)
    }

    pub fn agent_name_matches(&self, name: &str) -> bool {
        regex_any(&self.agent_name_patterns, name)
    }

    pub fn is_llm_call_path(&self, path: &str) -> bool {
        self.llm_call_markers
            .iter()
            .any(|m| path.contains(m.as_str()))
    }

    pub fn is_tool_base(&self, base: &str) -> bool {
        let terminal = base.rsplit('.').next().unwrap_or(base);
        self.tool_base_markers
            .iter()
            .any(|m| terminal.contains(m.as_str()))
    }

    pub fn is_tool_decorator(&self, decorator: &str) -> bool {
        let terminal = decorator
            .trim_end_matches("()")
            .rsplit('.')
            .next()
            .unwrap_or(decorator);
        self.tool_decorators.iter().any(|d| d == terminal)
    }

    pub fn is_credential_name(&self, name: &str) -> bool {
        let lower = name.to_lowercase();
        self.credential_patterns
            .iter()
            .any(|p| lower.contains(p.as_str()))
    }

    pub fn is_tool_collection_name(&self, name: &str) -> bool {
        let lower = name.to_lowercase();
        self.tool_collection_patterns
            .iter()
            .any(|p| lower.contains(p.as_str()))
    }

    /// Lowercase content tokens of a free-text description, split on
    /// non-alphanumerics, stopwords removed.
    pub fn content_tokens(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_ascii_alphanumeric())
            .filter(|t| t.len() > 1)
            .map(|t| t.to_lowercase())
            .filter(|t| !self.description_stopwords.iter().any(|s| s == t))
            .collect()
    }

    /// Lowercase tokens of an identifier: snake_case and camelCase split.
    pub fn identifier_tokens(&self, ident: &str) -> Vec<String> {
        let mut tokens = Vec::new();
        for part in ident.split(|c: char| !c.is_ascii_alphanumeric()) {
            if part.is_empty() {
                continue;
            }
            let mut current = String::new();
            let chars: Vec<char> = part.chars().collect();
            for (i, &c) in chars.iter().enumerate() {
                if c.is_uppercase() && i > 0 && chars[i - 1].is_lowercase() {
                    tokens.push(std::mem::take(&mut current));
                }
                current.push(c.to_ascii_lowercase());
            }
            if !current.is_empty() {
                tokens.push(current);
            }
        }
        tokens.retain(|t| t.len() > 1);
        tokens
    }
}

fn regex_any(patterns: &[String], text: &str) -> bool {
    patterns.iter().any(|p| {
        regex::Regex::new(p)
            .map(|re| re.is_match(text))
            .unwrap_or(false)
    })
}
