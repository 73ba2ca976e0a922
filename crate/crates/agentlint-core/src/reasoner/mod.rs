//! The reasoner answers batched yes/no and identifier-extraction
//! questions about code snippets. Two interchangeable backends: a
//! deterministic heuristic rule set for offline runs (the default) and a
//! remote chat-completion API. Both produce verdicts in the same fixed
//! line format, validated before use.

mod heuristic;
pub mod markers;
mod prompts;
mod remote;
mod validate;

pub use heuristic::heuristic_answer;
pub use markers::{MarkerConfig, MarkerError};
pub use prompts::render_question;
pub use remote::{ChatTransport, UreqTransport};
pub use validate::{render_answers, validate_response};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendKind {
    Heuristic,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: Option<String>,
    pub max_retries: u32,
    pub parallelism: usize,
    pub timeout_secs: u64,
}

impl BackendConfig {
    pub fn heuristic() -> Self {
        BackendConfig {
            kind: BackendKind::Heuristic,
            endpoint: None,
            model: None,
            api_key_env: None,
            max_retries: 2,
            parallelism: 4,
            timeout_secs: 60,
        }
    }

    pub fn remote(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        BackendConfig {
            kind: BackendKind::Remote,
            endpoint: Some(endpoint.into()),
            model: Some(model.into()),
            api_key_env: None,
            max_retries: 2,
            parallelism: 4,
            timeout_secs: 60,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            BackendKind::Heuristic => "heuristic",
            BackendKind::Remote => "remote",
        }
    }
}

/// Question templates. Booleans unless noted as identifier-extracting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TemplateId {
    IsLlmInit,
    IsAgentInit,
    IsToolInit,
    ToolInfoConsistent,
    HasFaultToleranceIn,
    HasFaultToleranceOut,
    ToolCodeDefect,
    /// Identifier: the function executed to invoke the model.
    LlmExecFunctionName,
    /// Identifier: the function executed to invoke a tool.
    ToolExecFunctionName,
    LlmCallCorrect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnswerType {
    Boolean,
    Identifier,
}

impl TemplateId {
    pub fn answer_type(&self) -> AnswerType {
        match self {
            TemplateId::LlmExecFunctionName | TemplateId::ToolExecFunctionName => {
                AnswerType::Identifier
            }
            _ => AnswerType::Boolean,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TemplateId::IsLlmInit => "IS_LLM_INIT",
            TemplateId::IsAgentInit => "IS_AGENT_INIT",
            TemplateId::IsToolInit => "IS_TOOL_INIT",
            TemplateId::ToolInfoConsistent => "TOOL_INFO_CONSISTENT",
            TemplateId::HasFaultToleranceIn => "HAS_FAULT_TOLERANCE_IN",
            TemplateId::HasFaultToleranceOut => "HAS_FAULT_TOLERANCE_OUT",
            TemplateId::ToolCodeDefect => "TOOL_CODE_DEFECT",
            TemplateId::LlmExecFunctionName => "LLM_EXEC_FUNCTION_NAME",
            TemplateId::ToolExecFunctionName => "TOOL_EXEC_FUNCTION_NAME",
            TemplateId::LlmCallCorrect => "LLM_CALL_CORRECT",
        }
    }
}

/// Well-known fact keys carried in question payloads.
pub mod facts {
    /// Syntactic base-class names of the subject class.
    pub const BASE: &str = "base";
    pub const DECORATOR: &str = "decorator";
    /// Dotted paths of calls appearing in the subject's body.
    pub const CALL: &str = "call";
    /// Method names defined on the subject class.
    pub const METHOD: &str = "method";
    /// Methods whose body contains a model-invocation marker.
    pub const LLM_CALL_METHOD: &str = "llm_call_method";
    /// Registered tool name value (may be empty or absent).
    pub const TOOL_NAME: &str = "tool_name";
    pub const TOOL_DESCRIPTION: &str = "tool_description";
    /// Identifier tokens from the implementation, lowercased.
    pub const IMPL_TOKEN: &str = "impl_token";
    /// Guard descriptions on the input/output side of a call window.
    pub const GUARD_IN: &str = "guard_in";
    pub const GUARD_OUT: &str = "guard_out";
    /// "true" when the window's call is inside a try block.
    pub const IN_TRY: &str = "in_try";
    /// Credential attribute names with statically empty values.
    pub const CRED_EMPTY: &str = "cred_empty";
    /// All credential attribute names that flow into the client.
    pub const CRED: &str = "cred";
    /// "true" when the completion call passes a stop-style argument.
    pub const STOP_PRESENT: &str = "stop_present";
    /// Trigger words defined by the project, when any.
    pub const TRIGGER_WORD: &str = "trigger_word";
    /// "true" when the subject holds a tool-collection attribute.
    pub const TOOL_COLLECTION: &str = "tool_collection";
    /// "true" when the subject calls into the located LLM init node.
    pub const CALLS_LLM: &str = "calls_llm";
}

/// One subject under question: a snippet plus structured facts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionItem {
    /// Qualified name of the node under question.
    pub subject: String,
    pub snippet: String,
    pub facts: BTreeMap<String, Vec<String>>,
}

impl QuestionItem {
    pub fn new(subject: impl Into<String>, snippet: impl Into<String>) -> Self {
        QuestionItem {
            subject: subject.into(),
            snippet: snippet.into(),
            facts: BTreeMap::new(),
        }
    }

    pub fn with_fact(mut self, key: &str, value: impl Into<String>) -> Self {
        self.facts
            .entry(key.to_string())
            .or_default()
            .push(value.into());
        self
    }

    pub fn with_facts<I, S>(mut self, key: &str, values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let entry = self.facts.entry(key.to_string()).or_default();
        entry.extend(values.into_iter().map(Into::into));
        self
    }

    pub fn fact(&self, key: &str) -> &[String] {
        self.facts.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn fact_is_true(&self, key: &str) -> bool {
        self.fact(key).iter().any(|v| v == "true")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReasonerQuestion {
    pub template_id: TemplateId,
    pub items: Vec<QuestionItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    Ident(String),
}

impl Answer {
    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Yes)
    }

    pub fn ident(&self) -> Option<&str> {
        match self {
            Answer::Ident(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReasonerVerdict {
    pub template_id: TemplateId,
    /// One answer per batch item, in item order.
    pub answers: Vec<Answer>,
    pub rationale: String,
    /// Raw backend payload the answers were extracted from.
    pub raw: String,
    pub backend_tag: String,
}

#[derive(Debug, Error)]
pub enum ReasonerError {
    #[error("empty question batch for {0}")]
    EmptyBatch(&'static str),
    #[error("batch of {got} exceeds the configured limit of {limit}")]
    BatchTooLarge { got: usize, limit: usize },
    #[error("question item {subject} has an empty snippet")]
    EmptySnippet { subject: String },
    #[error("no heuristic rule for template {0}")]
    NoRule(&'static str),
    #[error("remote backend missing endpoint or model")]
    RemoteUnconfigured,
    #[error("api key environment variable {0} is not set")]
    AuthMissing(String),
    #[error("backend unreachable after {attempts} attempts: {detail}")]
    BackendUnreachable { attempts: u32, detail: String },
    #[error("invalid response format after {attempts} attempts: {detail}")]
    FormatInvalid { attempts: u32, detail: String },
}

/// Reasoner facade owning the backend configuration, marker data, and
/// (for the remote kind) the HTTP transport.
pub struct Reasoner {
    backend: BackendConfig,
    markers: Arc<MarkerConfig>,
    max_batch: usize,
    transport: Box<dyn ChatTransport>,
}

impl Reasoner {
    pub fn new(backend: BackendConfig, markers: Arc<MarkerConfig>, max_batch: usize) -> Self {
        let timeout = backend.timeout_secs;
        Reasoner {
            backend,
            markers,
            max_batch,
            transport: Box::new(UreqTransport::new(timeout)),
        }
    }

    /// Replaces the HTTP transport; used by tests to avoid the network.
    pub fn with_transport(mut self, transport: Box<dyn ChatTransport>) -> Self {
        self.transport = transport;
        self
    }

    pub fn markers(&self) -> &MarkerConfig {
        &self.markers
    }

    pub fn backend(&self) -> &BackendConfig {
        &self.backend
    }

    pub fn ask(&self, question: &ReasonerQuestion) -> Result<ReasonerVerdict, ReasonerError> {
        if question.items.is_empty() {
            return Err(ReasonerError::EmptyBatch(question.template_id.as_str()));
        }
        if question.items.len() > self.max_batch {
            return Err(ReasonerError::BatchTooLarge {
                got: question.items.len(),
                limit: self.max_batch,
            });
        }
        if let Some(item) = question.items.iter().find(|i| i.snippet.trim().is_empty()) {
            return Err(ReasonerError::EmptySnippet {
                subject: item.subject.clone(),
            });
        }
        match self.backend.kind {
            BackendKind::Heuristic => heuristic_answer(question, &self.markers),
            BackendKind::Remote => {
                remote::ask_remote(&self.backend, self.transport.as_ref(), question)
            }
        }
    }
}
