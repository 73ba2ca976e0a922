//! End-to-end runs over the bundled fixture corpus with the heuristic
//! backend: each seeded project must flag exactly its seeded defect
//! kinds, and the clean project must flag nothing.

use agentlint_core::config::AnalyzerConfig;
use agentlint_core::findings::DefectKind;
use agentlint_core::pipeline::run_analysis;
use std::collections::BTreeSet;
use std::path::PathBuf;

pub fn fixture_root(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn detected_kinds(name: &str) -> BTreeSet<DefectKind> {
    let outcome = run_analysis(&fixture_root(name), &AnalyzerConfig::default())
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"));
    assert!(
        outcome.report.parse_failures.is_empty(),
        "fixture {name} has parse failures: {:?}",
        outcome.report.parse_failures
    );
    assert!(
        outcome.report.oracle_errors.is_empty(),
        "fixture {name} has oracle errors: {:?}",
        outcome.report.oracle_errors
    );
    outcome
        .report
        .findings
        .iter()
        .map(|f| f.defect_id)
        .collect()
}

fn assert_kinds(name: &str, expected: &[DefectKind]) {
    let got = detected_kinds(name);
    let want: BTreeSet<DefectKind> = expected.iter().copied().collect();
    assert_eq!(got, want, "fixture {name}");
}

#[test]
fn adal_fixture() {
    assert_kinds("adal", &[DefectKind::Adal]);
}

#[test]
fn ieti_fixture() {
    assert_kinds("ieti", &[DefectKind::Ieti]);
}

#[test]
fn lope_fixture() {
    assert_kinds("lope", &[DefectKind::Lope]);
}

#[test]
fn tre_fixture() {
    assert_kinds("tre", &[DefectKind::Tre]);
}

#[test]
fn als_mnft_fixture_flags_both() {
    assert_kinds("als_mnft", &[DefectKind::Als, DefectKind::Mnft]);
}

#[test]
fn mnft_fixture() {
    assert_kinds("mnft", &[DefectKind::Mnft]);
}

#[test]
fn lard_fixture() {
    assert_kinds("lard", &[DefectKind::Lard]);
}

#[test]
fn epdd_fixture_single_warning() {
    let outcome = run_analysis(&fixture_root("epdd"), &AnalyzerConfig::default()).unwrap();
    let epdd: Vec<_> = outcome
        .report
        .findings
        .iter()
        .filter(|f| f.defect_id == DefectKind::Epdd)
        .collect();
    assert_eq!(epdd.len(), 1, "{:?}", outcome.report.findings);
    assert_eq!(
        epdd[0].severity,
        agentlint_core::findings::Severity::Warning
    );
    assert!(epdd[0].rationale.contains("pydantic"));
    assert_eq!(
        outcome.report.findings.len(),
        1,
        "unexpected extra findings: {:?}",
        outcome.report.findings
    );
}

#[test]
fn clean_fixture_is_quiet() {
    assert_kinds("clean", &[]);
}
