//! LLM API-related defect: credentials that are statically empty, or a
//! completion call missing the stop parameter when the project defines
//! trigger words.

use super::context::{each_call_in_body, OracleContext};
use super::OracleError;
use crate::cpg::ast::ExprKind;
use crate::enrich::AttrValue;
use crate::findings::{DefectFinding, DefectKind};
use crate::reasoner::{facts, QuestionItem, ReasonerQuestion, TemplateId};
use crate::unrt::UnifiedKind;

pub fn detect_lard(ctx: &OracleContext) -> Result<Vec<DefectFinding>, OracleError> {
    let Some(init) = ctx.ensure_llm_init()? else {
        return Ok(Vec::new());
    };
    if init.kind != UnifiedKind::Class {
        return Ok(Vec::new());
    }
    let _ = ctx.ensure_llm_exec_fn()?;
    let markers = ctx.reasoner.markers();

    // Credential-like attribute facts that flow into the client code.
    let attr_facts = ctx
        .enricher
        .attribute_facts(init.graph_id)
        .map_err(OracleError::Enrich)?;
    let mut used_attrs: Vec<String> = Vec::new();
    for fn_id in ctx.enricher.class_functions(init.graph_id) {
        if let Ok((def, _)) = ctx.enricher.function_def(fn_id) {
            crate::cpg::ast::visit_exprs(&def.body, &mut |e| {
                for path in e.read_attr_paths() {
                    if let Some(attr) = path.strip_prefix("self.") {
                        used_attrs.push(attr.to_string());
                    }
                }
            });
        }
    }
    let mut cred_all = Vec::new();
    let mut cred_empty = Vec::new();
    for fact in &attr_facts {
        if !markers.is_credential_name(&fact.name) {
            continue;
        }
        if !used_attrs.iter().any(|a| a == &fact.name) {
            continue;
        }
        cred_all.push(fact.name.clone());
        if matches!(&fact.init_value, AttrValue::Str(s) if s.is_empty()) {
            cred_empty.push(fact.name.clone());
        }
    }

    // Stop parameter on completion calls inside the init class.
    let mut stop_present = false;
    let mut completion_call_text: Option<(String, (u32, u32))> = None;
    for fn_id in ctx.enricher.class_functions(init.graph_id) {
        let Ok((def, unit)) = ctx.enricher.function_def(fn_id) else {
            continue;
        };
        let file = &ctx.snapshot.files[unit];
        each_call_in_body(&def.body, &mut |call, func| {
            let path = func.path_string();
            if !markers.is_llm_call_path(&path) && !markers.is_llm_call_path(&format!("{path}(")) {
                return;
            }
            if completion_call_text.is_none() {
                let text =
                    file.text[call.span.start..call.span.end.min(file.text.len())].to_string();
                let lines = (
                    file.line_of(call.span.start),
                    file.line_of(call.span.end.saturating_sub(1).max(call.span.start)),
                );
                completion_call_text = Some((text, lines));
            }
            if let ExprKind::Call { keywords, .. } = &call.kind {
                for kw in keywords {
                    if let Some(name) = &kw.name {
                        if markers.stop_kwargs.iter().any(|s| s == name) {
                            stop_present = true;
                        }
                    }
                }
            }
        });
    }

    let trigger = ctx.ensure_trigger_words()?;

    let snippet = ctx
        .enricher
        .snippet(init.graph_id)
        .map(|s| s.text)
        .unwrap_or_default();
    let mut item = QuestionItem::new(init.name.clone(), snippet);
    item = item.with_facts(facts::CRED, cred_all.iter().cloned());
    item = item.with_facts(facts::CRED_EMPTY, cred_empty.iter().cloned());
    item = item.with_fact(
        facts::STOP_PRESENT,
        if stop_present { "true" } else { "false" },
    );
    item = item.with_facts(facts::TRIGGER_WORD, trigger.words.iter().cloned());

    let verdict = ctx
        .reasoner
        .ask(&ReasonerQuestion {
            template_id: TemplateId::LlmCallCorrect,
            items: vec![item],
        })
        .map_err(OracleError::Reasoner)?;
    if verdict.answers.first().is_some_and(|a| a.is_yes()) {
        return Ok(Vec::new());
    }

    let mut evidence = Vec::new();
    let mut reasons = Vec::new();
    for name in &cred_empty {
        evidence.push(format!(
            "attribute {name} is initialized to an empty string"
        ));
        reasons.push(format!("{name} is empty"));
    }
    if !stop_present && !trigger.words.is_empty() {
        evidence.push(format!(
            "completion call passes no stop argument while trigger words exist: {}",
            trigger
                .words
                .iter()
                .map(|w| format!("{w:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
        reasons.push("the stop parameter is missing".to_string());
    }
    let (span, mut more_evidence) = match completion_call_text {
        Some((text, lines)) => (lines, vec![text]),
        None => (init.span, Vec::new()),
    };
    evidence.append(&mut more_evidence);
    if reasons.is_empty() {
        reasons.push("the invocation pattern was judged incorrect".to_string());
    }

    Ok(vec![DefectFinding::new(
        DefectKind::Lard,
        init.file.clone(),
        span,
        evidence,
        format!(
            "the model API invocation in {} is incorrect: {}; the call will fail or the agent \
             will be unable to terminate its reasoning loop",
            init.name,
            reasons.join(" and ")
        ),
    )])
}
