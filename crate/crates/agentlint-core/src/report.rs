//! Defect report assembly and rendering: canonical JSON (sorted keys,
//! LF, UTF-8) for machines, markdown for people.

use crate::findings::{DefectFinding, DefectKind};
use crate::oracles::LocatorSummary;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

pub const RATIONALE_LIMIT: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub backend: String,
    pub model: Option<String>,
    pub batch_size: usize,
    pub enabled_oracles: Vec<String>,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectReport {
    pub tool_version: String,
    /// UTC, RFC 3339.
    pub generated_at: String,
    pub project_root: String,
    pub config_echo: ConfigEcho,
    /// (file, line, message) triples for files that failed to parse.
    pub parse_failures: Vec<(String, u32, String)>,
    /// Inheritance cycles found while building the relationship tree.
    pub tree_warnings: Vec<String>,
    pub locator_summary: LocatorSummary,
    pub oracle_errors: Vec<(String, String)>,
    pub findings: Vec<DefectFinding>,
    /// Finding counts per defect id; all eight keys always present.
    pub stats: BTreeMap<String, usize>,
}

pub struct ReportMeta {
    pub project_root: String,
    pub config_echo: ConfigEcho,
    pub parse_failures: Vec<(String, u32, String)>,
    pub tree_warnings: Vec<String>,
    pub locator_summary: LocatorSummary,
    pub oracle_errors: Vec<(String, String)>,
}

/// Assembles the report: findings sorted, rationales truncated, stats
/// consistent with the findings multiset.
pub fn build_report(mut findings: Vec<DefectFinding>, meta: ReportMeta) -> DefectReport {
    findings.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    for finding in &mut findings {
        if finding.rationale.len() > RATIONALE_LIMIT {
            let mut cut = RATIONALE_LIMIT;
            while !finding.rationale.is_char_boundary(cut) {
                cut -= 1;
            }
            finding.rationale.truncate(cut);
        }
    }
    let mut stats: BTreeMap<String, usize> = DefectKind::ALL
        .iter()
        .map(|k| (k.id().to_string(), 0))
        .collect();
    for finding in &findings {
        *stats.get_mut(finding.defect_id.id()).unwrap() += 1;
    }
    DefectReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        generated_at: rfc3339_utc_now(),
        project_root: meta.project_root,
        config_echo: meta.config_echo,
        parse_failures: meta.parse_failures,
        tree_warnings: meta.tree_warnings,
        locator_summary: meta.locator_summary,
        oracle_errors: meta.oracle_errors,
        findings,
        stats,
    }
}

impl DefectReport {
    pub fn has_findings(&self) -> bool {
        !self.findings.is_empty()
    }
}

/// Canonical JSON: keys sorted (via `serde_json::Value`'s BTreeMap
/// object representation), two-space indentation, trailing newline,
/// UTF-8 throughout. Byte-stable for identical reports.
pub fn render_json(report: &DefectReport) -> Vec<u8> {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut bytes = serde_json::to_vec_pretty(&value).expect("value renders");
    bytes.push(b'\n');
    bytes
}

pub fn parse_json(bytes: &[u8]) -> Result<DefectReport, serde_json::Error> {
    serde_json::from_slice(bytes)
}

/// Human-readable rendering: one section per defect type with a count,
/// one subsection per finding.
pub fn render_markdown(report: &DefectReport) -> String {
    let mut out = String::new();
    out.push_str("# Agent defect report\n\n");
    out.push_str(&format!(
        "- project: `{}`\n- generated: {}\n- backend: {}\n- tool version: {}\n\n",
        report.project_root, report.generated_at, report.config_echo.backend, report.tool_version
    ));
    if !report.parse_failures.is_empty() {
        out.push_str(&format!(
            "{} file(s) had syntax issues and were analyzed partially.\n\n",
            report.parse_failures.len()
        ));
    }
    if report.findings.is_empty() {
        out.push_str("No defects detected.\n");
        return out;
    }
    for kind in DefectKind::ALL {
        let group: Vec<&DefectFinding> = report
            .findings
            .iter()
            .filter(|f| f.defect_id == kind)
            .collect();
        if group.is_empty() {
            continue;
        }
        out.push_str(&format!("## {} ({})\n\n", kind.id(), group.len()));
        for finding in group {
            out.push_str(&format!(
                "### {}:{}..{} [{:?}]\n\n",
                finding.file, finding.span.0, finding.span.1, finding.severity
            ));
            if !finding.evidence.is_empty() {
                out.push_str("```\n");
                for line in &finding.evidence {
                    out.push_str(line);
                    out.push('\n');
                }
                out.push_str("```\n\n");
            }
            out.push_str(&format!("{}\n\n", finding.rationale));
            out.push_str(&format!("Remediation: {}\n\n", finding.remediation));
        }
    }
    out
}

/// RFC 3339 timestamp in UTC, seconds precision, hand-rolled from the
/// civil-from-days algorithm to avoid a clock dependency.
pub fn rfc3339_utc_now() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    rfc3339_from_unix(secs as i64)
}

pub fn rfc3339_from_unix(secs: i64) -> String {
    let days = secs.div_euclid(86_400);
    let rem = secs.rem_euclid(86_400);
    let (hour, minute, second) = (rem / 3600, (rem % 3600) / 60, rem % 60);
    let (year, month, day) = civil_from_days(days);
    format!("{year:04}-{month:02}-{day:02}T{hour:02}:{minute:02}:{second:02}Z")
}

fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::findings::Severity;

    fn meta() -> ReportMeta {
        ReportMeta {
            project_root: "/proj".to_string(),
            config_echo: ConfigEcho {
                backend: "heuristic".to_string(),
                model: None,
                batch_size: 10,
                enabled_oracles: DefectKind::ALL.iter().map(|k| k.id().to_string()).collect(),
                strict: false,
            },
            parse_failures: Vec::new(),
            tree_warnings: Vec::new(),
            locator_summary: LocatorSummary::default(),
            oracle_errors: Vec::new(),
        }
    }

    fn sample_finding(kind: DefectKind) -> DefectFinding {
        DefectFinding::new(
            kind,
            "agent.py",
            (3, 9),
            vec!["evidence line".to_string()],
            "something is off",
        )
    }

    #[test]
    fn empty_report_stats_all_zero() {
        let report = build_report(Vec::new(), meta());
        assert_eq!(report.stats.len(), 8);
        assert!(report.stats.values().all(|&v| v == 0));
        assert!(!report.has_findings());
    }

    #[test]
    fn remediation_text_from_catalog() {
        let report = build_report(vec![sample_finding(DefectKind::Ieti)], meta());
        assert_eq!(
            report.findings[0].remediation,
            "Reduce the development of tools with similar functionalities or increase their differentiation."
        );
    }

    #[test]
    fn stats_match_findings_multiset() {
        let report = build_report(
            vec![
                sample_finding(DefectKind::Als),
                sample_finding(DefectKind::Mnft),
            ],
            meta(),
        );
        assert_eq!(report.stats["ALS"], 1);
        assert_eq!(report.stats["MNFT"], 1);
        assert_eq!(report.stats.values().sum::<usize>(), 2);
    }

    #[test]
    fn json_round_trip_structural_equality() {
        let report = build_report(
            vec![
                sample_finding(DefectKind::Epdd),
                sample_finding(DefectKind::Adal),
            ],
            meta(),
        );
        let bytes = render_json(&report);
        let parsed = parse_json(&bytes).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn json_is_canonical_and_stable() {
        let mut report = build_report(vec![sample_finding(DefectKind::Tre)], meta());
        report.generated_at = "2025-01-01T00:00:00Z".to_string();
        let a = render_json(&report);
        let b = render_json(&report);
        assert_eq!(a, b);
        assert_eq!(a.last(), Some(&b'\n'));
        assert!(!String::from_utf8(a.clone()).unwrap().contains('\r'));
        // keys sorted: config_echo precedes findings precedes stats
        let text = String::from_utf8(a).unwrap();
        let pos = |needle: &str| text.find(needle).unwrap();
        assert!(pos("\"config_echo\"") < pos("\"findings\""));
        assert!(pos("\"findings\"") < pos("\"stats\""));
    }

    #[test]
    fn non_ascii_rationale_survives() {
        let mut finding = sample_finding(DefectKind::Lard);
        finding.rationale = "modèle non initialisé — ключ пуст".to_string();
        let report = build_report(vec![finding], meta());
        let bytes = render_json(&report);
        assert!(std::str::from_utf8(&bytes).is_ok());
        let parsed = parse_json(&bytes).unwrap();
        assert!(parsed.findings[0].rationale.contains("ключ"));
    }

    #[test]
    fn rationale_truncated_at_limit() {
        let mut finding = sample_finding(DefectKind::Lope);
        finding.rationale = "x".repeat(RATIONALE_LIMIT * 2);
        let report = build_report(vec![finding], meta());
        assert_eq!(report.findings[0].rationale.len(), RATIONALE_LIMIT);
    }

    #[test]
    fn markdown_empty_report() {
        let report = build_report(Vec::new(), meta());
        let md = render_markdown(&report);
        assert!(md.contains("No defects detected."));
    }

    #[test]
    fn markdown_one_finding_one_subsection() {
        let report = build_report(vec![sample_finding(DefectKind::Mnft)], meta());
        let md = render_markdown(&report);
        assert_eq!(md.matches("### ").count(), 1);
        assert!(md.contains("## MNFT (1)"));
        assert!(md.contains("Remediation:"));
    }

    #[test]
    fn markdown_rendering_is_pure() {
        let mut report = build_report(vec![sample_finding(DefectKind::Als)], meta());
        report.generated_at = "2025-01-01T00:00:00Z".to_string();
        assert_eq!(render_markdown(&report), render_markdown(&report));
    }

    #[test]
    fn findings_sorted_by_file_span_kind() {
        let mut f1 = sample_finding(DefectKind::Mnft);
        f1.file = "b.py".to_string();
        let mut f2 = sample_finding(DefectKind::Als);
        f2.file = "a.py".to_string();
        f2.span = (10, 11);
        let mut f3 = sample_finding(DefectKind::Epdd);
        f3.file = "a.py".to_string();
        f3.span = (2, 4);
        let report = build_report(vec![f1, f2, f3], meta());
        let order: Vec<(&str, u32)> = report
            .findings
            .iter()
            .map(|f| (f.file.as_str(), f.span.0))
            .collect();
        assert_eq!(order, vec![("a.py", 2), ("a.py", 10), ("b.py", 3)]);
    }

    #[test]
    fn epdd_finding_stays_warning_through_report() {
        let report = build_report(vec![sample_finding(DefectKind::Epdd)], meta());
        assert_eq!(report.findings[0].severity, Severity::Warning);
    }

    #[test]
    fn rfc3339_formatting() {
        assert_eq!(rfc3339_from_unix(0), "1970-01-01T00:00:00Z");
        assert_eq!(rfc3339_from_unix(951_782_400), "2000-02-29T00:00:00Z");
        assert_eq!(rfc3339_from_unix(1_754_611_200), "2025-08-08T00:00:00Z");
        let now = rfc3339_utc_now();
        assert_eq!(now.len(), 20);
        assert!(now.ends_with('Z'));
    }
}
