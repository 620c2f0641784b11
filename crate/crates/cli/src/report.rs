//! Versioned JSON report shared by every subcommand.

use mokkt::calculus::SecondDerivative;
use mokkt::catalog::{KnownFact, NamedPoint};
use mokkt::cq::CqReport;
use mokkt::gconvex::{Property, ProbeResult};
use mokkt::kkt::{CertVerdict, Certification};
use mokkt::pareto::{Classification, OracleVerdict, RestrictionReport};
use mokkt::{ProblemFile, Tolerances};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "mokkt-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch. Not part of the deterministic content.
    pub timestamp: u64,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemFile>,
    pub result: CommandResult,
    pub exit: Exit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exit {
    pub code: i32,
    pub classification: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    #[serde(flatten)]
    pub result: ProbeResult,
    /// The counterexample reproduced on a fresh evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reverified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogSummary {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CommandResult {
    Certify {
        point: Vec<f64>,
        certification: Certification,
    },
    Cq {
        point: Vec<f64>,
        report: CqReport,
    },
    Pareto {
        point: Vec<f64>,
        verdict: OracleVerdict,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        restriction: Option<RestrictionReport>,
    },
    Probe {
        property: Property,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<Vec<f64>>,
        results: Vec<ProbeEntry>,
    },
    Deriv {
        function: String,
        point: Vec<f64>,
        direction: Vec<f64>,
        value: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gradient: Option<Vec<f64>>,
        /// Set when the function has no gradient at the point.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diagnostic: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        second: Option<SecondDerivative>,
    },
    CatalogList {
        entries: Vec<CatalogSummary>,
    },
    CatalogShow {
        id: String,
        description: String,
        points: Vec<NamedPoint>,
        facts: Vec<KnownFact>,
    },
    Error {
        message: String,
    },
}

impl CommandResult {
    /// Exit status, computed from the report content only.
    pub fn exit(&self) -> Exit {
        let (code, class) = match self {
            CommandResult::Certify { certification, .. } => match certification.verdict {
                CertVerdict::Certified => (0, "certified"),
                CertVerdict::Refuted { .. } => (1, "refuted"),
                CertVerdict::Inconclusive { .. } => (2, "inconclusive"),
            },
            CommandResult::Cq { report, .. } => match (report.mfcq.holds, report.socq.verdict.holds()) {
                (true, true) => (0, "mfcq-and-socq-hold"),
                (false, true) => (1, "socq-holds-mfcq-fails"),
                _ => (2, "socq-fails-or-inconclusive"),
            },
            CommandResult::Pareto { verdict, .. } => match verdict.classification {
                Classification::Pareto => (0, "pareto"),
                Classification::WeakParetoOnly => (1, "weak-pareto-only"),
                Classification::Dominated => (2, "dominated"),
            },
            CommandResult::Probe { results, .. } => {
                if results.iter().any(|r| r.result.found_counterexample()) {
                    (1, "counterexample")
                } else {
                    (0, "none-found")
                }
            }
            CommandResult::Deriv { second, .. } => match second {
                Some(s) if s.status.is_finite_value() => (0, "finite"),
                Some(_) => (2, "nonfinite-or-failed"),
                None => (2, "not-differentiable"),
            },
            CommandResult::CatalogList { .. } | CommandResult::CatalogShow { .. } => (0, "ok"),
            CommandResult::Error { .. } => (3, "error"),
        };
        Exit {
            code,
            classification: class.into(),
        }
    }
}
