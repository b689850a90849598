//! JSON model files.
//!
//! ```json
//! {
//!   "actions": ["suicide"],
//!   "background": [],
//!   "consequences": ["dead"],
//!   "patients": ["Bob"],
//!   "mechanisms": {"dead": "suicide"},
//!   "affects": {"suicide": [["Bob", "+"]], "dead": []},
//!   "goals": {"suicide": ["dead"]}
//! }
//! ```
//!
//! Affect keys and goal entries are literal strings, `name` or `!name`.
//! Mechanism strings use the mechanism grammar of [`lang`](crate::lang).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{CheckedModel, InvalidModel};
use crate::lang::{self, render_mechanism};
use crate::model::{Affect, Diagnostic, Literal, Model, Sign};

/// On-disk shape of a model. Map keys serialise in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub actions: Vec<String>,
    #[serde(default)]
    pub background: Vec<String>,
    #[serde(default)]
    pub consequences: Vec<String>,
    #[serde(default)]
    pub patients: Vec<String>,
    #[serde(default)]
    pub mechanisms: BTreeMap<String, String>,
    #[serde(default)]
    pub affects: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub goals: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed model document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid model:\n{}", render_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialises")
    }

    /// Compiles the textual parts. Every syntax problem is reported, each
    /// with the path of the offending entry.
    pub fn to_model(&self) -> Result<Model, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let literal = |diags: &mut Vec<Diagnostic>, path: String, text: &str| match lang::parse_literal(text) {
            Ok(l) => Some(l),
            Err(e) => {
                diags.push(Diagnostic::error(path, format!("bad literal {text:?}: {e}")));
                None
            }
        };

        let mut goals = BTreeMap::new();
        for (action, entries) in &self.goals {
            let lits = entries
                .iter()
                .filter_map(|g| literal(&mut diags, format!("goals.{action}"), g))
                .collect();
            goals.insert(action.clone(), lits);
        }

        let mut affects = Vec::new();
        for (key, entries) in &self.affects {
            let Some(lit) = literal(&mut diags, format!("affects.{key}"), key) else {
                continue;
            };
            for (patient, sign) in entries {
                match sign.parse::<Sign>() {
                    Ok(sign) => affects.push(Affect::new(lit.clone(), patient.clone(), sign)),
                    Err(e) => diags.push(Diagnostic::error(format!("affects.{key}"), e)),
                }
            }
        }

        let mut mechanisms = BTreeMap::new();
        for (target, text) in &self.mechanisms {
            match lang::parse_mechanism(text) {
                Ok(e) => {
                    mechanisms.insert(target.clone(), e);
                }
                Err(e) => diags.push(Diagnostic::error(format!("mechanisms.{target}"), e.to_string())),
            }
        }

        if !diags.is_empty() {
            diags.sort();
            return Err(diags);
        }
        Ok(Model {
            actions: self.actions.clone(),
            background: self.background.clone(),
            consequences: self.consequences.clone(),
            mechanisms,
            goals,
            patients: self.patients.clone(),
            affects,
        })
    }

    /// Every action and consequence gets an affect entry, empty if nothing
    /// is listed for it; negated keys appear only when used.
    pub fn from_model(model: &Model) -> Self {
        let mut affects: BTreeMap<String, Vec<(String, String)>> = model
            .actions
            .iter()
            .chain(&model.consequences)
            .map(|v| (v.clone(), Vec::new()))
            .collect();
        for a in &model.affects {
            affects
                .entry(a.literal.to_string())
                .or_default()
                .push((a.patient.clone(), a.sign.symbol().to_string()));
        }
        ModelDocument {
            actions: model.actions.clone(),
            background: model.background.clone(),
            consequences: model.consequences.clone(),
            patients: model.patients.clone(),
            mechanisms: model
                .mechanisms
                .iter()
                .map(|(c, e)| (c.clone(), render_mechanism(e)))
                .collect(),
            affects,
            goals: model
                .goals
                .iter()
                .map(|(a, gs)| (a.clone(), gs.iter().map(Literal::to_string).collect()))
                .collect(),
        }
    }
}

/// Parses and validates a model document held in memory.
pub fn model_from_json(text: &str) -> Result<CheckedModel, LoadError> {
    let doc = ModelDocument::from_json(text)?;
    let model = doc.to_model().map_err(LoadError::Invalid)?;
    CheckedModel::new(model).map_err(|InvalidModel(diags)| {
        LoadError::Invalid(diags.into_iter().filter(Diagnostic::is_error).collect())
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<CheckedModel, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    model_from_json(&text)
}

pub fn model_to_json(model: &Model) -> String {
    ModelDocument::from_model(model).to_json_pretty()
}
