//! Action listener setting: a trigger word collides with a tool name or
//! a statically resolvable tool return value, so the agent can fire a
//! listener on its own plumbing.

use super::context::OracleContext;
use super::OracleError;
use crate::cpg::ast::{Stmt, StmtKind};
use crate::findings::{DefectFinding, DefectKind};
use std::collections::BTreeSet;

pub fn detect_als(ctx: &OracleContext) -> Result<Vec<DefectFinding>, OracleError> {
    let trigger = ctx.ensure_trigger_words()?;
    if trigger.words.is_empty() {
        return Ok(Vec::new());
    }
    let instances = ctx.ensure_tool_instances()?;
    let mut findings = Vec::new();

    for tool in &instances {
        // Colliding registration names.
        let mut collisions: BTreeSet<String> = BTreeSet::new();
        if let Some(name) = &tool.name_value {
            if trigger.words.contains(name) {
                collisions.insert(name.clone());
            }
        }
        // Colliding statically known return literals.
        let mut return_literals: BTreeSet<String> = BTreeSet::new();
        let mut incomplete = trigger.incomplete;
        if tool.is_class {
            for fn_id in ctx.enricher.class_functions(tool.graph_id) {
                let Ok((def, unit)) = ctx.enricher.function_def(fn_id) else {
                    continue;
                };
                for value in return_exprs(&def.body) {
                    let res = ctx.enricher.resolve_literals(unit, value, Some(fn_id));
                    return_literals.extend(res.literals);
                    incomplete |= res.incomplete || res.truncated;
                }
            }
        } else if let Ok((def, unit)) = ctx.enricher.function_def(tool.graph_id) {
            for value in return_exprs(&def.body) {
                let res = ctx
                    .enricher
                    .resolve_literals(unit, value, Some(tool.graph_id));
                return_literals.extend(res.literals);
                incomplete |= res.incomplete || res.truncated;
            }
        }
        collisions.extend(return_literals.intersection(&trigger.words).cloned());

        for word in collisions {
            let mut rationale = format!(
                "trigger word {word:?} collides with tool {}; the agent will treat the tool's \
                 name or output as a control signal and cut its run short",
                tool.qualname
            );
            if incomplete {
                rationale.push_str(
                    " (literal resolution was incomplete; dynamically built values were not compared)",
                );
            }
            findings.push(DefectFinding::new(
                DefectKind::Als,
                tool.file.clone(),
                tool.span,
                vec![
                    format!("colliding word: {word:?}"),
                    format!(
                        "trigger words: {}",
                        trigger
                            .words
                            .iter()
                            .map(|w| format!("{w:?}"))
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                ],
                rationale,
            ));
        }
    }
    Ok(findings)
}

fn return_exprs(body: &[Stmt]) -> Vec<&crate::cpg::ast::Expr> {
    let mut out = Vec::new();
    fn visit<'s>(stmts: &'s [Stmt], out: &mut Vec<&'s crate::cpg::ast::Expr>) {
        for stmt in stmts {
            match &stmt.kind {
                StmtKind::Return { value: Some(v) } => out.push(v),
                StmtKind::If { body, orelse, .. } | StmtKind::While { body, orelse, .. } => {
                    visit(body, out);
                    visit(orelse, out);
                }
                StmtKind::For { body, orelse, .. } => {
                    visit(body, out);
                    visit(orelse, out);
                }
                StmtKind::Try {
                    body,
                    handlers,
                    orelse,
                    finalbody,
                } => {
                    visit(body, out);
                    for h in handlers {
                        visit(&h.body, out);
                    }
                    visit(orelse, out);
                    visit(finalbody, out);
                }
                StmtKind::With { body, .. } => visit(body, out),
                _ => {}
            }
        }
    }
    visit(body, &mut out);
    out
}
