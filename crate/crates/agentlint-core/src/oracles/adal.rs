//! Adaptation defect between agent and LLM: the configured model is a
//! task-specific or outdated non-chat model.

use super::context::OracleContext;
use super::registry::ModelCapability;
use super::OracleError;
use crate::findings::{DefectFinding, DefectKind, Severity};

pub fn detect_adal(ctx: &OracleContext) -> Result<Vec<DefectFinding>, OracleError> {
    let Some(init) = ctx.ensure_llm_init()? else {
        return Ok(Vec::new());
    };
    let mut findings = Vec::new();
    for model in ctx.ensure_model_names()? {
        let capability = ctx.registry.lookup(&model);
        match capability {
            ModelCapability::TaskSpecific | ModelCapability::OutdatedNonChat => {
                let kind_text = match capability {
                    ModelCapability::TaskSpecific => "a task-specific model",
                    _ => "an outdated non-chat model",
                };
                let snippet = ctx
                    .enricher
                    .snippet(init.graph_id)
                    .map(|s| s.text)
                    .unwrap_or_default();
                findings.push(DefectFinding::new(
                    DefectKind::Adal,
                    init.file.clone(),
                    init.span,
                    vec![format!("model name: {model}"), snippet],
                    format!(
                        "the agent is configured with {kind_text} ({model}), which lacks the \
                         general dialogue capability agent prompting relies on"
                    ),
                ));
            }
            ModelCapability::Unknown if ctx.config.strict => {
                let mut finding = DefectFinding::new(
                    DefectKind::Adal,
                    init.file.clone(),
                    init.span,
                    vec![format!("model name: {model}")],
                    format!(
                        "the capability of model {model} is unknown to the registry; verify it \
                         is a general chat model before relying on it"
                    ),
                );
                finding.severity = Severity::Warning;
                findings.push(finding);
            }
            _ => {}
        }
    }
    Ok(findings)
}
