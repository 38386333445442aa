//! Certificate and report documents.
//!
//! Certificates carry a tri-state status: conditions proved at an exact
//! witness hold, necessary conditions observed violated fail, and
//! everything cut short by a cap or resting on a sufficient-only test is
//! inconclusive rather than negative.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertStatus {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for CertStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertStatus::Holds => write!(f, "holds"),
            CertStatus::Fails => write!(f, "fails"),
            CertStatus::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// One certificate: the property checked, the result that licenses the
/// conclusion, the status, and the numeric/symbolic evidence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertEntry {
    pub name: String,
    pub rule: String,
    pub status: CertStatus,
    pub evidence: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CertificateReport {
    pub entries: Vec<CertEntry>,
}

impl CertificateReport {
    pub fn push(
        &mut self,
        name: impl Into<String>,
        rule: impl Into<String>,
        status: CertStatus,
        evidence: impl Into<String>,
    ) {
        self.entries.push(CertEntry {
            name: name.into(),
            rule: rule.into(),
            status,
            evidence: evidence.into(),
        });
    }

    pub fn extend(&mut self, other: CertificateReport) {
        self.entries.extend(other.entries);
    }

    pub fn status_of(&self, name: &str) -> Option<CertStatus> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.status)
    }

    pub fn has_failures(&self) -> bool {
        self.entries.iter().any(|e| e.status == CertStatus::Fails)
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for entry in &self.entries {
            writeln!(f, "[{}] {} — {}", entry.status, entry.name, entry.evidence)?;
        }
        Ok(())
    }
}

/// Top-level machine-readable report emitted by the command-line tool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub tool_version: String,
    pub input_digest: String,
    pub checks: Vec<CertEntry>,
    pub trajectories: Vec<String>,
}

impl ReportDocument {
    pub fn new(tool_version: impl Into<String>, input_digest: impl Into<String>) -> Self {
        ReportDocument {
            schema: "report/1".into(),
            tool_version: tool_version.into(),
            input_digest: input_digest.into(),
            checks: Vec::new(),
            trajectories: Vec::new(),
        }
    }

    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|e| e.status == CertStatus::Fails)
    }
}
