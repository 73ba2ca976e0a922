//! Static analysis for LLM-agent codebases.

pub mod config;
pub mod cpg;
pub mod enrich;
pub mod findings;
pub mod ingest;
pub mod oracles;
pub mod pipeline;
pub mod reasoner;
pub mod report;
pub mod unrt;

mod glob;

pub use config::AnalyzerConfig;
pub use cpg::{CodePropertyGraph, GraphEdge, GraphNode};
pub use findings::{DefectFinding, DefectKind, Severity};
pub use ingest::{ProjectSnapshot, SourceFile};
pub use pipeline::{analyze_snapshot, run_analysis, AnalysisOutcome, PipelineError};
pub use reasoner::{BackendConfig, BackendKind};
pub use report::DefectReport;
pub use unrt::{build_unrt, layered_search, UnifiedNode, Unrt};
