//! LLM output parsing error: model invocations lacking fault tolerance
//! around inputs or outputs, and framework construction arguments that
//! explicitly disable parse-error handling.

use super::context::{each_call_in_body, OracleContext};
use super::fault_tolerance::windows_missing_guards;
use super::OracleError;
use crate::cpg::ast::ExprKind;
use crate::findings::{DefectFinding, DefectKind};
use std::collections::BTreeSet;

pub fn detect_lope(ctx: &OracleContext) -> Result<Vec<DefectFinding>, OracleError> {
    let mut findings = Vec::new();

    // Fault tolerance around model invocations in agent code.
    let _ = ctx.ensure_agent_init()?;
    if let Some(exec_fn) = ctx.ensure_llm_exec_fn()? {
        let callee_names: BTreeSet<String> = [exec_fn].into_iter().collect();
        for missing in windows_missing_guards(ctx, &callee_names)? {
            findings.push(DefectFinding::new(
                DefectKind::Lope,
                missing.file,
                missing.span,
                missing.evidence,
                format!(
                    "the model invocation `{}` lacks fault tolerance on its {} side; unparseable \
                     model output will escape unchecked",
                    missing.call, missing.side
                ),
            ));
        }
    }

    // Construction arguments that switch parse-error handling off.
    let markers = ctx.reasoner.markers();
    for (unit_idx, unit) in ctx.cpg.units.iter().enumerate() {
        let file = &ctx.snapshot.files[unit_idx];
        each_call_in_body(&unit.body, &mut |call, func| {
            if let ExprKind::Call { keywords, .. } = &call.kind {
                for kw in keywords {
                    let Some(name) = &kw.name else { continue };
                    if !markers.parse_error_kwargs.iter().any(|k| k == name) {
                        continue;
                    }
                    if matches!(kw.value.kind, ExprKind::Bool(false)) {
                        let line = file.line_of(call.span.start);
                        let end_line =
                            file.line_of(call.span.end.saturating_sub(1).max(call.span.start));
                        let text = file.text[call.span.start..call.span.end.min(file.text.len())]
                            .to_string();
                        findings.push(DefectFinding::new(
                            DefectKind::Lope,
                            file.path.clone(),
                            (line, end_line),
                            vec![text],
                            format!(
                                "`{}` is constructed with {name}=False, so unparseable model \
                                 output terminates the agent instead of being handled",
                                func.path_string()
                            ),
                        ));
                    }
                }
            }
        });
    }

    Ok(findings)
}
