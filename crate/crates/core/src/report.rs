//! Verdict rendering: a machine-readable JSON document and a text form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::{Context, EngineError};
use crate::principles::{ci_verdict, end_assessment, means_witness, EndFailure, Reading, Verdict};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EndFailureRecord {
    NoPositiveGoal,
    NegativeGoal { goal: String },
}

impl From<&EndFailure> for EndFailureRecord {
    fn from(f: &EndFailure) -> Self {
        match f {
            EndFailure::NoPositiveGoal => EndFailureRecord::NoPositiveGoal,
            EndFailure::NegativeGoal(g) => EndFailureRecord::NegativeGoal { goal: g.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub patient: String,
    pub means_witness: String,
    pub end_failures: Vec<EndFailureRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatientRow {
    pub patient: String,
    pub means1: bool,
    pub means2: bool,
    pub end: bool,
}

/// Machine form of a categorical imperative check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub schema_version: String,
    pub action: String,
    pub reading: u8,
    pub permissible: bool,
    pub violations: Vec<ViolationRecord>,
    pub patients: Vec<PatientRow>,
}

impl VerdictReport {
    pub fn build(ctx: &Context<'_>, reading: Reading) -> Result<(Verdict, VerdictReport), EngineError> {
        let verdict = ci_verdict(ctx, reading)?;
        let mut patients = Vec::new();
        for p in &ctx.model().model().patients {
            patients.push(PatientRow {
                patient: p.clone(),
                means1: means_witness(ctx, p, Reading::One)?.is_some(),
                means2: means_witness(ctx, p, Reading::Two)?.is_some(),
                end: end_assessment(ctx, p)?.treated_as_end(),
            });
        }
        let report = VerdictReport {
            schema_version: SCHEMA_VERSION.to_string(),
            action: verdict.action.clone(),
            reading: reading.number(),
            permissible: verdict.permissible,
            violations: verdict
                .violations
                .iter()
                .map(|v| ViolationRecord {
                    patient: v.patient.clone(),
                    means_witness: v.means_witness.to_string(),
                    end_failures: v.end_failures.iter().map(Into::into).collect(),
                })
                .collect(),
            patients,
        };
        Ok((verdict, report))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Text explanation naming the means witness and the failed end condition
/// for each violation.
pub fn render_text(verdict: &Verdict) -> String {
    let mut out = String::new();
    let status = if verdict.permissible { "permissible" } else { "impermissible" };
    let _ = writeln!(out, "{}: {} under {}", verdict.action, status, verdict.reading);
    for v in &verdict.violations {
        let _ = writeln!(out, "  {v}");
    }
    out
}
