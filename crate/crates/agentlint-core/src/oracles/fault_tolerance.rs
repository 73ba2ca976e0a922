//! Shared fault-tolerance probe: extracts call-context windows for a set
//! of callee names across the agent's functions and asks the reasoner
//! whether inputs and outputs are guarded.

use super::context::OracleContext;
use super::OracleError;
use crate::enrich::ContextWindow;
use crate::reasoner::{facts, QuestionItem, ReasonerQuestion, TemplateId};
use std::collections::BTreeSet;

pub struct MissingGuard {
    pub file: String,
    pub span: (u32, u32),
    pub call: String,
    /// "input", "output", or "input and output".
    pub side: &'static str,
    pub evidence: Vec<String>,
}

fn window_item(window: &ContextWindow) -> QuestionItem {
    let mut item = QuestionItem::new(
        window.call_site.enclosing_qualname.clone(),
        window.call_site.text.clone(),
    );
    if window.in_try_block {
        item = item.with_fact(facts::IN_TRY, "true");
    }
    item = item.with_facts(facts::GUARD_IN, window.input_guards.describe());
    item = item.with_facts(facts::GUARD_OUT, window.output_guards.describe());
    item
}

/// Windows around calls to `callee_names` in agent-scope functions whose
/// input or output side lacks fault tolerance.
pub fn windows_missing_guards(
    ctx: &OracleContext,
    callee_names: &BTreeSet<String>,
) -> Result<Vec<MissingGuard>, OracleError> {
    let mut windows: Vec<ContextWindow> = Vec::new();
    for fn_id in ctx.agent_scope_functions()? {
        windows.extend(
            ctx.enricher
                .call_context(fn_id, callee_names)
                .map_err(OracleError::Enrich)?,
        );
    }
    if windows.is_empty() {
        return Ok(Vec::new());
    }

    let mut missing = Vec::new();
    for chunk in windows.chunks(ctx.config.batch_size) {
        let items: Vec<QuestionItem> = chunk.iter().map(window_item).collect();
        let ask = |template| {
            ctx.reasoner
                .ask(&ReasonerQuestion {
                    template_id: template,
                    items: items.clone(),
                })
                .map_err(OracleError::Reasoner)
        };
        let in_verdict = ask(TemplateId::HasFaultToleranceIn)?;
        let out_verdict = ask(TemplateId::HasFaultToleranceOut)?;
        for (i, window) in chunk.iter().enumerate() {
            let in_ok = in_verdict.answers[i].is_yes();
            let out_ok = out_verdict.answers[i].is_yes();
            if in_ok && out_ok {
                continue;
            }
            let side = match (in_ok, out_ok) {
                (false, false) => "input and output",
                (false, true) => "input",
                (true, false) => "output",
                _ => unreachable!(),
            };
            let mut evidence = vec![window.call_site.text.clone()];
            evidence.extend(window.input_guards.describe());
            evidence.extend(window.output_guards.describe());
            missing.push(MissingGuard {
                file: window.call_site.file.clone(),
                span: window.call_site.line_span,
                call: window.call_site.text.clone(),
                side,
                evidence,
            });
        }
    }
    Ok(missing)
}
