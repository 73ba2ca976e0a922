//! Insufficient external tool information: missing or inconsistent
//! registration (name, description) versus the implementation.

use super::context::OracleContext;
use super::OracleError;
use crate::findings::{DefectFinding, DefectKind};
use crate::reasoner::{facts, QuestionItem, ReasonerQuestion, TemplateId};

pub fn detect_ieti(ctx: &OracleContext) -> Result<Vec<DefectFinding>, OracleError> {
    let instances = ctx.ensure_tool_instances()?;
    if instances.is_empty() {
        return Ok(Vec::new());
    }

    let mut findings = Vec::new();
    for chunk in instances.chunks(ctx.config.batch_size) {
        let items: Vec<QuestionItem> = chunk
            .iter()
            .map(|tool| {
                let snippet = ctx
                    .enricher
                    .snippet(tool.graph_id)
                    .map(|s| s.text)
                    .unwrap_or_default();
                let mut item = QuestionItem::new(tool.qualname.clone(), snippet);
                if let Some(name) = &tool.name_value {
                    item = item.with_fact(facts::TOOL_NAME, name.clone());
                }
                if let Some(desc) = &tool.description_value {
                    item = item.with_fact(facts::TOOL_DESCRIPTION, desc.clone());
                }
                item = item.with_facts(facts::IMPL_TOKEN, tool.impl_tokens.iter().cloned());
                item
            })
            .collect();
        let question = ReasonerQuestion {
            template_id: TemplateId::ToolInfoConsistent,
            items,
        };
        let verdict = ctx.reasoner.ask(&question).map_err(OracleError::Reasoner)?;
        for (tool, answer) in chunk.iter().zip(&verdict.answers) {
            if answer.is_yes() {
                continue;
            }
            let name_shown = tool.name_value.clone().unwrap_or_default();
            let desc_shown = tool.description_value.clone().unwrap_or_default();
            findings.push(DefectFinding::new(
                DefectKind::Ieti,
                tool.file.clone(),
                tool.span,
                vec![
                    format!("registered name: {name_shown:?}"),
                    format!("registered description: {desc_shown:?}"),
                ],
                format!(
                    "tool {} has missing or inconsistent registration information; the agent \
                     selects tools by name and description, so it cannot reliably invoke this one",
                    tool.qualname
                ),
            ));
        }
    }
    Ok(findings)
}
