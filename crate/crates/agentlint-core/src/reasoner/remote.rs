//! Remote chat-completion backend. Speaks the plain JSON protocol —
//! `POST {model, messages, temperature}` with a bearer token — against a
//! configurable endpoint; nothing vendor-specific is hardcoded.

use super::prompts::{render_question, SYSTEM_PROMPT};
use super::validate::validate_response;
use super::{BackendConfig, ReasonerError, ReasonerQuestion, ReasonerVerdict};
use serde::{Deserialize, Serialize};
use std::time::Duration;

#[derive(Debug, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Debug, Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

/// Transport abstraction so tests can run without a network.
pub trait ChatTransport: Send + Sync {
    fn complete(
        &self,
        endpoint: &str,
        bearer: Option<&str>,
        request: &ChatRequest,
    ) -> Result<String, String>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout_secs: u64) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(timeout_secs)))
            .build();
        UreqTransport {
            agent: config.into(),
        }
    }
}

impl ChatTransport for UreqTransport {
    fn complete(
        &self,
        endpoint: &str,
        bearer: Option<&str>,
        request: &ChatRequest,
    ) -> Result<String, String> {
        let body = serde_json::to_string(request).map_err(|e| format!("encode: {e}"))?;
        let mut builder = self
            .agent
            .post(endpoint)
            .header("content-type", "application/json");
        if let Some(token) = bearer {
            builder = builder.header("authorization", format!("Bearer {token}"));
        }
        let mut response = builder
            .send(&body)
            .map_err(|e| format!("request failed: {e}"))?;
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| format!("read body: {e}"))?;
        let parsed: ChatResponse =
            serde_json::from_str(&text).map_err(|e| format!("malformed response body: {e}"))?;
        parsed
            .choices
            .first()
            .map(|c| c.message.content.clone())
            .ok_or_else(|| "response carried no choices".to_string())
    }
}

/// Asks the remote backend, re-asking on malformed output or transport
/// failure up to `max_retries` additional attempts. Every verdict
/// returned from here passed [`validate_response`].
pub fn ask_remote(
    backend: &BackendConfig,
    transport: &dyn ChatTransport,
    question: &ReasonerQuestion,
) -> Result<ReasonerVerdict, ReasonerError> {
    let (Some(endpoint), Some(model)) = (&backend.endpoint, &backend.model) else {
        return Err(ReasonerError::RemoteUnconfigured);
    };
    let bearer = match &backend.api_key_env {
        Some(var) => match std::env::var(var) {
            Ok(value) if !value.is_empty() => Some(value),
            _ => return Err(ReasonerError::AuthMissing(var.clone())),
        },
        None => None,
    };

    let user_prompt = render_question(question);
    let request = ChatRequest {
        model: model.clone(),
        messages: vec![
            ChatMessage {
                role: "system".to_string(),
                content: SYSTEM_PROMPT.to_string(),
            },
            ChatMessage {
                role: "user".to_string(),
                content: user_prompt,
            },
        ],
        temperature: 0.0,
    };

    let attempts_allowed = backend.max_retries + 1;
    let mut last_transport_error = None;
    let mut last_format_error = None;
    for attempt in 1..=attempts_allowed {
        match transport.complete(endpoint, bearer.as_deref(), &request) {
            Err(detail) => last_transport_error = Some((attempt, detail)),
            Ok(raw) => match validate_response(&raw, question.template_id, question.items.len()) {
                Ok((answers, rationale)) => {
                    return Ok(ReasonerVerdict {
                        template_id: question.template_id,
                        answers,
                        rationale,
                        raw,
                        backend_tag: "remote".to_string(),
                    });
                }
                Err(problem) => last_format_error = Some((attempt, problem.detail)),
            },
        }
    }
    // Report whichever failure happened last.
    match (last_format_error, last_transport_error) {
        (Some((fa, fd)), Some((ta, td))) => {
            if fa >= ta {
                Err(ReasonerError::FormatInvalid {
                    attempts: attempts_allowed,
                    detail: fd,
                })
            } else {
                Err(ReasonerError::BackendUnreachable {
                    attempts: attempts_allowed,
                    detail: td,
                })
            }
        }
        (Some((_, detail)), None) => Err(ReasonerError::FormatInvalid {
            attempts: attempts_allowed,
            detail,
        }),
        (None, Some((_, detail))) => Err(ReasonerError::BackendUnreachable {
            attempts: attempts_allowed,
            detail,
        }),
        (None, None) => unreachable!("loop ran at least once"),
    }
}
