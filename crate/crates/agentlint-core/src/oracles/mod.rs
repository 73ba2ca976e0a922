//! The eight defect oracles, executed over the relationship tree, the
//! enrichment facts, and the reasoner, with intermediate results shared
//! through [`OracleContext`].

mod adal;
mod als;
mod context;
mod epdd;
mod fault_tolerance;
mod ieti;
mod lard;
mod lope;
mod mnft;
pub mod registry;
mod tre;

pub use adal::detect_adal;
pub use als::detect_als;
pub use context::{LocatorSummary, OracleContext, ToolInstance, TriggerWords};
pub use epdd::detect_epdd;
pub use ieti::detect_ieti;
pub use lard::detect_lard;
pub use lope::detect_lope;
pub use mnft::detect_mnft;
pub use registry::{ModelCapability, ModelCapabilityRegistry, RegistryEntry, RemoteLookup};
pub use tre::detect_tre;

use crate::findings::{DefectFinding, DefectKind};
use crate::reasoner::ReasonerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("reasoner: {0}")]
    Reasoner(#[from] ReasonerError),
    #[error("enrichment: {0}")]
    Enrich(#[from] crate::enrich::EnrichError),
    #[error("layered search for {template}: {detail}")]
    Search {
        template: &'static str,
        detail: String,
    },
    #[error("relationship tree: {0}")]
    Tree(String),
}

impl OracleError {
    pub(crate) fn tree(err: crate::unrt::UnrtError) -> Self {
        OracleError::Tree(err.to_string())
    }
}

pub fn detect(ctx: &OracleContext, kind: DefectKind) -> Result<Vec<DefectFinding>, OracleError> {
    match kind {
        DefectKind::Adal => detect_adal(ctx),
        DefectKind::Ieti => detect_ieti(ctx),
        DefectKind::Lope => detect_lope(ctx),
        DefectKind::Tre => detect_tre(ctx),
        DefectKind::Als => detect_als(ctx),
        DefectKind::Mnft => detect_mnft(ctx),
        DefectKind::Lard => detect_lard(ctx),
        DefectKind::Epdd => detect_epdd(ctx),
    }
}

/// Runs the enabled oracles in their fixed order, never aborting the
/// remaining ones on a failure. Findings come back sorted by
/// (file, span, defect id); errors are collected per oracle.
pub fn run_all(ctx: &OracleContext) -> (Vec<DefectFinding>, Vec<(DefectKind, String)>) {
    let mut findings = Vec::new();
    let mut errors = Vec::new();
    for kind in DefectKind::ALL {
        if !ctx.config.enabled.contains(&kind) {
            continue;
        }
        match detect(ctx, kind) {
            Ok(mut batch) => findings.append(&mut batch),
            Err(err) => errors.push((kind, err.to_string())),
        }
    }
    findings.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    (findings, errors)
}
