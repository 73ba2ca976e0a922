//! End-to-end analysis pipeline: discover, parse, build the graph and
//! tree, run the oracles, and assemble the report.

use crate::config::AnalyzerConfig;
use crate::cpg::{build_cpg, CodePropertyGraph};
use crate::findings::DefectKind;
use crate::ingest::{discover_project, IngestError, ProjectSnapshot};
use crate::oracles::{run_all, ModelCapabilityRegistry, OracleContext};
use crate::reasoner::{MarkerConfig, Reasoner};
use crate::report::{build_report, ConfigEcho, DefectReport, ReportMeta};
use crate::unrt::{build_unrt, Unrt};
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("marker data: {0}")]
    Markers(#[from] crate::reasoner::MarkerError),
    #[error("registry data: {0}")]
    Registry(#[from] crate::oracles::registry::RegistryError),
    #[error("all {0} source file(s) failed to parse")]
    AllFilesFailedToParse(usize),
}

pub struct AnalysisOutcome {
    pub snapshot: ProjectSnapshot,
    pub cpg: CodePropertyGraph,
    pub unrt: Unrt,
    pub report: DefectReport,
}

/// Runs the full pipeline over `root` with the given configuration.
pub fn run_analysis(
    root: &Path,
    config: &AnalyzerConfig,
) -> Result<AnalysisOutcome, PipelineError> {
    let snapshot = discover_project(root, config)?;
    analyze_snapshot(snapshot, config)
}

/// Pipeline over an already-discovered snapshot; used by tests and by
/// callers that assemble sources in memory.
pub fn analyze_snapshot(
    snapshot: ProjectSnapshot,
    config: &AnalyzerConfig,
) -> Result<AnalysisOutcome, PipelineError> {
    let cpg = build_cpg(&snapshot);
    debug_assert!(cpg.validate().is_empty(), "{:?}", cpg.validate());
    if !snapshot.files.is_empty() && cpg.parse_failure_count() == snapshot.files.len() {
        return Err(PipelineError::AllFilesFailedToParse(snapshot.files.len()));
    }
    let unrt = build_unrt(&cpg);

    let markers = match &config.markers_path {
        Some(path) => Arc::new(MarkerConfig::from_file(path)?),
        None => Arc::new(MarkerConfig::bundled()),
    };
    let registry = match &config.registry_path {
        Some(path) => ModelCapabilityRegistry::from_file(path)?,
        None => ModelCapabilityRegistry::bundled(),
    };
    let reasoner = Reasoner::new(config.backend.clone(), markers, config.batch_size);

    let ctx = OracleContext::new(&snapshot, &cpg, &unrt, &reasoner, &registry, config);
    let (findings, errors) = run_all(&ctx);

    let meta = ReportMeta {
        project_root: snapshot.root.display().to_string(),
        config_echo: ConfigEcho {
            backend: config.backend.tag().to_string(),
            model: config.backend.model.clone(),
            batch_size: config.batch_size,
            enabled_oracles: DefectKind::ALL
                .iter()
                .filter(|k| config.enabled.contains(k))
                .map(|k| k.id().to_string())
                .collect(),
            strict: config.strict,
        },
        parse_failures: cpg
            .parse_failures
            .iter()
            .map(|(file, issue)| (file.clone(), issue.line, issue.message.clone()))
            .collect(),
        tree_warnings: unrt.cycle_warnings.clone(),
        locator_summary: ctx.locator_summary(),
        oracle_errors: errors
            .into_iter()
            .map(|(kind, msg)| (kind.id().to_string(), msg))
            .collect(),
    };
    let report = build_report(findings, meta);

    Ok(AnalysisOutcome {
        snapshot,
        cpg,
        unrt,
        report,
    })
}
