//! The model tuple, literals, situations and interventions, plus the
//! structural validator that runs before any reasoning.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine;
use crate::lang::{self, BoolExpr, ParseError};

/// Mechanisms mentioning more variables than this are rejected; dependence
/// checking enumerates all assignments of the mentioned variables.
pub const MAX_MECHANISM_VARIABLES: usize = 20;

/// Which of the three disjoint variable sets a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Action,
    Background,
    Consequence,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Action => "action",
            Kind::Background => "background",
            Kind::Consequence => "consequence",
        })
    }
}

/// A possibly negated variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: impl Into<String>) -> Self {
        Literal {
            var: var.into(),
            positive: true,
        }
    }

    pub fn neg(var: impl Into<String>) -> Self {
        Literal {
            var: var.into(),
            positive: false,
        }
    }

    pub fn new(var: impl Into<String>, positive: bool) -> Self {
        Literal {
            var: var.into(),
            positive,
        }
    }

    pub fn negate(&self) -> Self {
        Literal {
            var: self.var.clone(),
            positive: !self.positive,
        }
    }

    /// Whether this literal is satisfied when its variable has `value`.
    pub fn holds_for(&self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        f.write_str(&self.var)
    }
}

impl FromStr for Literal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        lang::parse_literal(s)
    }
}

/// Valence of an affect entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" => Ok(Sign::Positive),
            "-" => Ok(Sign::Negative),
            other => Err(format!("expected \"+\" or \"-\", found {other:?}")),
        }
    }
}

/// One element of the affect relation: `literal` knowingly affects `patient`
/// with the given sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affect {
    pub literal: Literal,
    pub patient: String,
    pub sign: Sign,
}

impl Affect {
    pub fn new(literal: Literal, patient: impl Into<String>, sign: Sign) -> Self {
        Affect {
            literal,
            patient: patient.into(),
            sign,
        }
    }
}

/// The raw model tuple as written by a modeller. Nothing here is checked;
/// run [`validate_model`] or build a [`CheckedModel`](crate::CheckedModel).
///
/// Affect keys and goals are literals rather than bare variables so that
/// entries like `(!drown, Alice, +)` can be expressed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub actions: Vec<String>,
    pub background: Vec<String>,
    pub consequences: Vec<String>,
    pub mechanisms: BTreeMap<String, BoolExpr>,
    pub goals: BTreeMap<String, Vec<Literal>>,
    pub patients: Vec<String>,
    pub affects: Vec<Affect>,
}

impl Model {
    /// Kind of `name`, if it is declared. With duplicate declarations the
    /// first one in action, background, consequence order wins.
    pub fn kind_of(&self, name: &str) -> Option<Kind> {
        if self.actions.iter().any(|a| a == name) {
            Some(Kind::Action)
        } else if self.background.iter().any(|b| b == name) {
            Some(Kind::Background)
        } else if self.consequences.iter().any(|c| c == name) {
            Some(Kind::Consequence)
        } else {
            None
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = (&str, Kind)> {
        self.actions
            .iter()
            .map(|v| (v.as_str(), Kind::Action))
            .chain(self.background.iter().map(|v| (v.as_str(), Kind::Background)))
            .chain(self.consequences.iter().map(|v| (v.as_str(), Kind::Consequence)))
    }

    pub fn has_patient(&self, patient: &str) -> bool {
        self.patients.iter().any(|p| p == patient)
    }

    pub fn goals_of(&self, action: &str) -> &[Literal] {
        self.goals.get(action).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A validation finding. `element` is a path to the offending part of the
/// model, e.g. `mechanisms.dead` or `affects.!drown`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub element: String,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn error(element: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            element: element.into(),
            severity: Severity::Error,
            message: message.into(),
        }
    }

    pub fn warning(element: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            element: element.into(),
            severity: Severity::Warning,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.element, self.message)
    }
}

/// Checks every structural side condition of the model tuple.
///
/// Returns an empty list iff the model is well formed. The result is sorted
/// by element name so repeated runs are identical.
///
/// Affect entries are read as (literal, patient, sign) triples with the
/// literal's variable in A ∪ C. The textbook clause for the affect predicate
/// names the action in the first slot of the triple; that does not type-check
/// against the relation, so the literal is taken as the key instead.
pub fn validate_model(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen: HashMap<&str, Kind> = HashMap::new();
    for (name, kind) in model.variables() {
        let path = format!("{kind}s.{name}");
        if !lang::is_identifier(name) {
            out.push(Diagnostic::error(&path, format!("{name:?} is not a valid identifier")));
        }
        if let Some(prev) = seen.insert(name, kind) {
            out.push(Diagnostic::error(
                &path,
                format!("variable {name} is declared more than once (already a {prev} variable)"),
            ));
        }
    }
    if model.actions.is_empty() {
        out.push(Diagnostic::error("actions", "model declares no actions"));
    }

    let mut patients = BTreeSet::new();
    for p in &model.patients {
        if !patients.insert(p.as_str()) {
            out.push(Diagnostic::error(format!("patients.{p}"), format!("patient {p} is declared more than once")));
        }
        if p.is_empty() || p.contains('"') {
            out.push(Diagnostic::warning(
                format!("patients.{p}"),
                format!("patient {p:?} cannot be named in a query"),
            ));
        }
    }

    for c in &model.consequences {
        if !model.mechanisms.contains_key(c) {
            out.push(Diagnostic::error(format!("mechanisms.{c}"), format!("consequence {c} has no mechanism")));
        }
    }
    let mut mechanisms_ok = true;
    for (target, expr) in &model.mechanisms {
        let path = format!("mechanisms.{target}");
        if model.kind_of(target) != Some(Kind::Consequence) {
            out.push(Diagnostic::error(&path, format!("{target} is not a consequence variable")));
            mechanisms_ok = false;
            continue;
        }
        let vars = expr.variables();
        for v in &vars {
            if v == target {
                out.push(Diagnostic::error(&path, format!("mechanism for {target} mentions {target} itself")));
                mechanisms_ok = false;
            } else if model.kind_of(v).is_none() {
                out.push(Diagnostic::error(&path, format!("unknown variable {v}")));
                mechanisms_ok = false;
            }
        }
        if vars.len() > MAX_MECHANISM_VARIABLES {
            out.push(Diagnostic::error(
                &path,
                format!(
                    "mechanism mentions {} variables (limit {MAX_MECHANISM_VARIABLES})",
                    vars.len()
                ),
            ));
            mechanisms_ok = false;
        }
    }

    for (action, goals) in &model.goals {
        let path = format!("goals.{action}");
        if model.kind_of(action) != Some(Kind::Action) {
            out.push(Diagnostic::error(&path, format!("{action} is not an action variable")));
        }
        for g in goals {
            if model.kind_of(&g.var).is_none() {
                out.push(Diagnostic::error(&path, format!("goal {g} refers to unknown variable {}", g.var)));
            }
        }
    }

    let mut signs: BTreeMap<(&Literal, &str), BTreeSet<Sign>> = BTreeMap::new();
    for affect in &model.affects {
        let path = format!("affects.{}", affect.literal);
        match model.kind_of(&affect.literal.var) {
            Some(Kind::Action) | Some(Kind::Consequence) => {}
            Some(Kind::Background) => out.push(Diagnostic::error(
                &path,
                format!("affect key must be in A ∪ C, but {} is a background variable", affect.literal.var),
            )),
            None => out.push(Diagnostic::error(&path, format!("unknown variable {}", affect.literal.var))),
        }
        if !patients.contains(affect.patient.as_str()) {
            out.push(Diagnostic::error(&path, format!("unknown patient {}", affect.patient)));
        }
        signs
            .entry((&affect.literal, affect.patient.as_str()))
            .or_default()
            .insert(affect.sign);
    }
    for ((lit, patient), s) in signs {
        if s.len() > 1 {
            out.push(Diagnostic::warning(
                format!("affects.{lit}"),
                format!("{lit} affects {patient} both positively and negatively"),
            ));
        }
    }

    // Dependence is only meaningful once every mechanism is well formed.
    if mechanisms_ok && !out.iter().any(|d| d.element.starts_with("consequences.")) {
        if let Err(engine::EngineError::CyclicModel(cycle)) = engine::build_dependence_graph(model) {
            let mut chain = cycle.clone();
            chain.push(cycle[0].clone());
            out.push(Diagnostic::error(
                format!("mechanisms.{}", cycle[0]),
                format!("dependence cycle {}", chain.join(" ≺ ")),
            ));
        }
    }

    out.sort();
    out.dedup();
    out
}

/// An admissible interpretation of the externally set variables: exactly one
/// action is performed and every background variable has a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Situation {
    action: String,
    background: BTreeMap<String, bool>,
}

impl Situation {
    pub fn action(&self) -> &str {
        &self.action
    }

    pub fn background(&self) -> &BTreeMap<String, bool> {
        &self.background
    }

    /// Value this situation gives an action or background variable.
    pub fn value_of(&self, model: &Model, var: &str) -> Option<bool> {
        match model.kind_of(var)? {
            Kind::Action => Some(var == self.action),
            Kind::Background => self.background.get(var).copied(),
            Kind::Consequence => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SituationError {
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("background variable {0} has no value")]
    MissingBackground(String),
    #[error("{0} is not a background variable")]
    ExtraneousBackground(String),
}

/// Builds the interpretation in which `action` is performed and all other
/// actions are not.
pub fn make_situation(
    model: &Model,
    action: &str,
    background: &BTreeMap<String, bool>,
) -> Result<Situation, SituationError> {
    if !model.actions.iter().any(|a| a == action) {
        return Err(SituationError::UnknownAction(action.to_string()));
    }
    if let Some(extra) = background.keys().find(|k| !model.background.contains(k)) {
        return Err(SituationError::ExtraneousBackground(extra.clone()));
    }
    if let Some(missing) = model.background.iter().find(|b| !background.contains_key(*b)) {
        return Err(SituationError::MissingBackground(missing.clone()));
    }
    Ok(Situation {
        action: action.to_string(),
        background: background.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("intervention forces {0} both true and false")]
pub struct InconsistentIntervention(pub String);

/// A consistent set of literals whose variables are forced, overriding both
/// the situation and the mechanisms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Intervention {
    forced: BTreeMap<String, bool>,
}

impl Intervention {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new<I>(literals: I) -> Result<Self, InconsistentIntervention>
    where
        I: IntoIterator<Item = Literal>,
    {
        let mut forced = BTreeMap::new();
        for lit in literals {
            if let Some(prev) = forced.insert(lit.var.clone(), lit.positive) {
                if prev != lit.positive {
                    return Err(InconsistentIntervention(lit.var));
                }
            }
        }
        Ok(Intervention { forced })
    }

    pub fn is_empty(&self) -> bool {
        self.forced.is_empty()
    }

    pub fn forced(&self, var: &str) -> Option<bool> {
        self.forced.get(var).copied()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.forced.iter().map(|(v, &b)| Literal::new(v.clone(), b))
    }

    /// `(X ∖ {y}) ∪ {¬y}`: the counterfactual intervention used by but-for
    /// causation.
    pub fn flipped(&self, y: &Literal) -> Intervention {
        let mut forced = self.forced.clone();
        forced.insert(y.var.clone(), !y.positive);
        Intervention { forced }
    }
}
