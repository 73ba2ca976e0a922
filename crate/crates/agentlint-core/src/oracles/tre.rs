//! Tool return error: a tool function that never returns a value, or a
//! tool implementation the reasoner flags as defective.

use super::context::OracleContext;
use super::OracleError;
use crate::enrich::MissingReturnReason;
use crate::findings::{DefectFinding, DefectKind};
use crate::reasoner::{QuestionItem, ReasonerQuestion, TemplateId};

pub fn detect_tre(ctx: &OracleContext) -> Result<Vec<DefectFinding>, OracleError> {
    let instances = ctx.ensure_tool_instances()?;
    let mut findings = Vec::new();

    for tool in &instances {
        if !tool.is_class {
            continue;
        }
        for missing in ctx
            .enricher
            .functions_missing_return(tool.graph_id)
            .map_err(OracleError::Enrich)?
        {
            let snippet = ctx
                .enricher
                .snippet(missing.function)
                .map(|s| s.text)
                .unwrap_or_default();
            let detail = match missing.reason {
                MissingReturnReason::BareReturnSplit => {
                    "a bare `return` is followed by the intended value on the next line, so the \
                     function returns nothing"
                }
                MissingReturnReason::NoReturn => "no execution path returns a value",
            };
            findings.push(DefectFinding::new(
                DefectKind::Tre,
                tool.file.clone(),
                missing.line_span,
                vec![snippet],
                format!(
                    "tool function {} never returns a value: {detail}; the agent will stall \
                     waiting for the tool's result",
                    missing.qualname
                ),
            ));
        }
    }

    // Free-form implementation check, affirmed only by a model backend.
    for chunk in instances.chunks(ctx.config.batch_size) {
        let items: Vec<QuestionItem> = chunk
            .iter()
            .map(|tool| {
                let snippet = ctx
                    .enricher
                    .snippet(tool.graph_id)
                    .map(|s| s.text)
                    .unwrap_or_default();
                QuestionItem::new(tool.qualname.clone(), snippet)
            })
            .collect();
        if items.is_empty() {
            continue;
        }
        let verdict = ctx
            .reasoner
            .ask(&ReasonerQuestion {
                template_id: TemplateId::ToolCodeDefect,
                items,
            })
            .map_err(OracleError::Reasoner)?;
        for (tool, answer) in chunk.iter().zip(&verdict.answers) {
            if answer.is_yes() {
                let snippet = ctx
                    .enricher
                    .snippet(tool.graph_id)
                    .map(|s| s.text)
                    .unwrap_or_default();
                findings.push(DefectFinding::new(
                    DefectKind::Tre,
                    tool.file.clone(),
                    tool.span,
                    vec![snippet],
                    format!(
                        "the implementation of tool {} was judged defective: {}",
                        tool.qualname,
                        first_sentence(&verdict.rationale)
                    ),
                ));
            }
        }
    }

    Ok(findings)
}

fn first_sentence(text: &str) -> &str {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return "see the reasoner rationale";
    }
    trimmed.split('\n').next().unwrap_or(trimmed)
}
