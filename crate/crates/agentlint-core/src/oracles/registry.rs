//! Model capability registry: classifies model names as general chat
//! models, task-specific models, or outdated non-chat models. An ordered
//! glob list from a bundled (or overridden) data file decides; a remote
//! model-card lookup can be enabled and degrades to the local patterns
//! on any failure.

use crate::glob::wildcard_match_ci;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const BUNDLED_REGISTRY: &str = include_str!("../../data/model_registry.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelCapability {
    GeneralChat,
    TaskSpecific,
    OutdatedNonChat,
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub glob: String,
    pub capability: ModelCapability,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read registry file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid registry file: {0}")]
    Decode(#[from] serde_json::Error),
}

/// Optional remote lookup; endpoint responses are expected to carry a
/// `pipeline_tag` field in JSON, which is mapped onto a capability.
#[derive(Debug, Clone)]
pub struct RemoteLookup {
    pub base_url: String,
    pub timeout_secs: u64,
}

#[derive(Debug, Clone)]
pub struct ModelCapabilityRegistry {
    /// First matching glob wins.
    patterns: Vec<RegistryEntry>,
    remote: Option<RemoteLookup>,
}

impl ModelCapabilityRegistry {
    pub fn bundled() -> Self {
        let patterns: Vec<RegistryEntry> =
            serde_json::from_str(BUNDLED_REGISTRY).expect("bundled model_registry.json is valid");
        ModelCapabilityRegistry {
            patterns,
            remote: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, RegistryError> {
        let text = std::fs::read_to_string(path).map_err(|source| RegistryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let patterns: Vec<RegistryEntry> = serde_json::from_str(&text)?;
        Ok(ModelCapabilityRegistry {
            patterns,
            remote: None,
        })
    }

    pub fn with_remote(mut self, remote: RemoteLookup) -> Self {
        self.remote = Some(remote);
        self
    }

    pub fn lookup(&self, model_name: &str) -> ModelCapability {
        if let Some(remote) = &self.remote {
            if let Some(cap) = remote_capability(remote, model_name) {
                return cap;
            }
            // Remote enabled but unavailable: degrade to local patterns.
        }
        self.lookup_local(model_name)
    }

    pub fn lookup_local(&self, model_name: &str) -> ModelCapability {
        for entry in &self.patterns {
            if wildcard_match_ci(&entry.glob, model_name) {
                return entry.capability;
            }
        }
        ModelCapability::Unknown
    }
}

#[derive(Debug, Deserialize)]
struct ModelCard {
    pipeline_tag: Option<String>,
}

fn remote_capability(remote: &RemoteLookup, model_name: &str) -> Option<ModelCapability> {
    let url = format!(
        "{}/{}",
        remote.base_url.trim_end_matches('/'),
        model_name.trim_start_matches('/')
    );
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(std::time::Duration::from_secs(remote.timeout_secs)))
        .build()
        .into();
    let mut response = agent.get(&url).call().ok()?;
    let text = response.body_mut().read_to_string().ok()?;
    let card: ModelCard = serde_json::from_str(&text).ok()?;
    match card.pipeline_tag.as_deref() {
        Some("conversational") | Some("text-generation") => Some(ModelCapability::GeneralChat),
        Some(_) => Some(ModelCapability::TaskSpecific),
        None => None,
    }
}
