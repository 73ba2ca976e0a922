//! External package dependency defect: a package imported both by a
//! tool's defining file and by the rest of the project. Reported as a
//! warning; version conflicts cannot be confirmed statically.

use super::context::OracleContext;
use super::OracleError;
use crate::findings::{DefectFinding, DefectKind};
use std::collections::BTreeSet;

pub fn detect_epdd(ctx: &OracleContext) -> Result<Vec<DefectFinding>, OracleError> {
    let instances = ctx.ensure_tool_instances()?;
    let mut findings = Vec::new();
    for tool in &instances {
        let partition: BTreeSet<String> = [tool.file.clone()].into();
        let (inside, outside) = ctx.enricher.import_sets(&partition);
        for package in inside.intersection(&outside) {
            findings.push(DefectFinding::new(
                DefectKind::Epdd,
                tool.file.clone(),
                tool.span,
                vec![
                    format!(
                        "package {package} is imported by the tool's file {}",
                        tool.file
                    ),
                    format!("package {package} is also imported elsewhere in the project"),
                ],
                format!(
                    "tool {} and the rest of the agent both depend on package {package}; a \
                     version mismatch between them can interrupt the agent's service",
                    tool.qualname
                ),
            ));
        }
    }
    Ok(findings)
}
