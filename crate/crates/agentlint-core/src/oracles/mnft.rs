//! Missing necessary fault tolerance around tool invocations in agent
//! code.

use super::context::OracleContext;
use super::fault_tolerance::windows_missing_guards;
use super::OracleError;
use crate::findings::{DefectFinding, DefectKind};
use std::collections::BTreeSet;

pub fn detect_mnft(ctx: &OracleContext) -> Result<Vec<DefectFinding>, OracleError> {
    let _ = ctx.ensure_agent_init()?;
    let _ = ctx.ensure_tool_init()?;
    let Some(exec_fn) = ctx.ensure_tool_exec_fn()? else {
        return Ok(Vec::new());
    };
    let callee_names: BTreeSet<String> = [exec_fn].into_iter().collect();
    let mut findings = Vec::new();
    for missing in windows_missing_guards(ctx, &callee_names)? {
        findings.push(DefectFinding::new(
            DefectKind::Mnft,
            missing.file,
            missing.span,
            missing.evidence,
            format!(
                "the tool invocation `{}` lacks fault tolerance on its {} side; a bad argument \
                 or unexpected tool result will interrupt the agent's service",
                missing.call, missing.side
            ),
        ));
    }
    Ok(findings)
}
