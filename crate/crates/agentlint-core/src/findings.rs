//! Shared finding types: defect identifiers, severities, and the
//! remediation catalog keyed by defect id.

use serde::{Deserialize, Serialize};
use std::fmt;

/// The eight defect classes reported by the analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DefectKind {
    /// Adaptation defect between agent and LLM: the configured model is
    /// task-specific or an outdated non-chat model.
    #[serde(rename = "ADAL")]
    Adal,
    /// Insufficient external tool information: missing or inconsistent
    /// tool registration (name, description) versus implementation.
    #[serde(rename = "IETI")]
    Ieti,
    /// LLM output parsing error: model invocations lack fault tolerance
    /// around inputs or outputs, or parse-error handling is disabled.
    #[serde(rename = "LOPE")]
    Lope,
    /// Tool return error: a tool function never returns a value.
    #[serde(rename = "TRE")]
    Tre,
    /// Action listener setting: a trigger word collides with a tool name
    /// or a statically known tool return value.
    #[serde(rename = "ALS")]
    Als,
    /// Missing necessary fault tolerance around tool invocations.
    #[serde(rename = "MNFT")]
    Mnft,
    /// LLM API-related defect: empty credentials or an incorrect
    /// invocation pattern (e.g. missing stop argument).
    #[serde(rename = "LARD")]
    Lard,
    /// External package dependency defect: a package is imported both by
    /// a tool and by the rest of the agent.
    #[serde(rename = "EPDD")]
    Epdd,
}

impl DefectKind {
    pub const ALL: [DefectKind; 8] = [
        DefectKind::Adal,
        DefectKind::Ieti,
        DefectKind::Lope,
        DefectKind::Tre,
        DefectKind::Als,
        DefectKind::Mnft,
        DefectKind::Lard,
        DefectKind::Epdd,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            DefectKind::Adal => "ADAL",
            DefectKind::Ieti => "IETI",
            DefectKind::Lope => "LOPE",
            DefectKind::Tre => "TRE",
            DefectKind::Als => "ALS",
            DefectKind::Mnft => "MNFT",
            DefectKind::Lard => "LARD",
            DefectKind::Epdd => "EPDD",
        }
    }

    pub fn parse(s: &str) -> Option<DefectKind> {
        let up = s.trim().to_uppercase();
        DefectKind::ALL.iter().copied().find(|k| k.id() == up)
    }

    /// Remediation text shipped with every finding of this kind.
    pub fn remediation(&self) -> &'static str {
        match self {
            DefectKind::Adal => {
                "Design and conduct comprehensive generation capability tests before using an LLM."
            }
            DefectKind::Ieti => {
                "Reduce the development of tools with similar functionalities or increase their differentiation."
            }
            DefectKind::Lope => {
                "Set necessary fault tolerance when invoking an LLM, such as setting handle_parsing_error to True in Langchain."
            }
            DefectKind::Tre => "Conduct thorough testing before registering a Tool into the Agent.",
            DefectKind::Als => {
                "Avoid designing overly simple trigger words and avoid using common function return values like None."
            }
            DefectKind::Mnft => {
                "Set necessary fault tolerance for inputs and outputs when the Agent invokes a Tool."
            }
            DefectKind::Lard => {
                "Ensure that the method for invoking the LLM is correct and that no essential parameters are missing."
            }
            DefectKind::Epdd => {
                "Regularly upgrade the Agent framework or test package versions in advance."
            }
        }
    }

    /// EPDD can only be flagged, never confirmed, by static analysis;
    /// everything else is reported as a defect.
    pub fn severity(&self) -> Severity {
        match self {
            DefectKind::Epdd => Severity::Warning,
            _ => Severity::Defect,
        }
    }
}

impl fmt::Display for DefectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Defect,
    Warning,
}

/// One detected defect instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectFinding {
    pub defect_id: DefectKind,
    pub severity: Severity,
    pub file: String,
    /// 1-based inclusive line span of the reported location.
    pub span: (u32, u32),
    /// Source snippets and structured facts supporting the finding.
    pub evidence: Vec<String>,
    pub rationale: String,
    pub remediation: String,
}

impl DefectFinding {
    pub fn new(
        kind: DefectKind,
        file: impl Into<String>,
        span: (u32, u32),
        evidence: Vec<String>,
        rationale: impl Into<String>,
    ) -> Self {
        DefectFinding {
            defect_id: kind,
            severity: kind.severity(),
            file: file.into(),
            span,
            evidence,
            rationale: rationale.into(),
            remediation: kind.remediation().to_string(),
        }
    }

    /// Sort key used everywhere findings are ordered.
    pub fn sort_key(&self) -> (String, u32, u32, &'static str) {
        (
            self.file.clone(),
            self.span.0,
            self.span.1,
            self.defect_id.id(),
        )
    }
}
