//! Treated-as-end, the two readings of treated-as-means, the categorical
//! imperative verdict and the meritorious principle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::engine::{CheckedModel, Context, EngineError};
use crate::lang::Formula;
use crate::model::{Intervention, Kind, Literal, Sign, Situation};

/// Which notion of "treated as a means" to apply.
///
/// Reading one counts a patient affected by something on the causal path
/// to a goal. Reading two counts a patient affected by any direct
/// consequence of the action, and so covers strictly more patients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Reading {
    #[default]
    One,
    Two,
}

impl Reading {
    pub const ALL: [Reading; 2] = [Reading::One, Reading::Two];

    pub fn number(self) -> u8 {
        match self {
            Reading::One => 1,
            Reading::Two => 2,
        }
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Reading-{}", self.number())
    }
}

impl FromStr for Reading {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "reading-1" | "reading1" => Ok(Reading::One),
            "2" | "reading-2" | "reading2" => Ok(Reading::Two),
            other => Err(format!("unknown reading {other:?}, expected 1 or 2")),
        }
    }
}

/// Why a patient is not treated as an end. Both can apply at once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EndFailure {
    /// No goal of the action affects the patient positively.
    NoPositiveGoal,
    /// This goal affects the patient negatively.
    NegativeGoal(Literal),
}

impl fmt::Display for EndFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndFailure::NoPositiveGoal => f.write_str("no goal affects them positively"),
            EndFailure::NegativeGoal(g) => write!(f, "goal {g} affects them negatively"),
        }
    }
}

/// Goals of the chosen action that positively and negatively affect one
/// patient, in goal-list order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EndAssessment {
    pub positive_goals: Vec<Literal>,
    pub negative_goals: Vec<Literal>,
}

impl EndAssessment {
    pub fn treated_as_end(&self) -> bool {
        !self.positive_goals.is_empty() && self.negative_goals.is_empty()
    }

    pub fn failures(&self) -> Vec<EndFailure> {
        let mut out = Vec::new();
        if self.positive_goals.is_empty() {
            out.push(EndFailure::NoPositiveGoal);
        }
        out.extend(self.negative_goals.iter().cloned().map(EndFailure::NegativeGoal));
        out
    }
}

pub(crate) fn end_assessment(ctx: &Context<'_>, patient: &str) -> Result<EndAssessment, EngineError> {
    let mut out = EndAssessment::default();
    for g in ctx.goals() {
        if ctx.affects(g, patient, Sign::Positive)? {
            out.positive_goals.push(g.clone());
        }
        if ctx.affects(g, patient, Sign::Negative)? {
            out.negative_goals.push(g.clone());
        }
    }
    // Validates the patient even when the goal list is empty.
    if ctx.goals().is_empty() && !ctx.model().model().has_patient(patient) {
        return Err(EngineError::UnknownPatient(patient.to_string()));
    }
    Ok(out)
}

/// First literal `v` over A ∪ C, in evaluation order, such that the action
/// is a but-for cause of `v`, `v` affects `patient`, and under reading one
/// `v` is also a but-for cause of some goal.
pub(crate) fn means_witness(
    ctx: &Context<'_>,
    patient: &str,
    reading: Reading,
) -> Result<Option<Literal>, EngineError> {
    let model = ctx.model();
    if !model.model().has_patient(patient) {
        return Err(EngineError::UnknownPatient(patient.to_string()));
    }
    let action = ctx.action_literal();
    for var in model.graph().order() {
        if model.kind_of(var) == Some(Kind::Background) {
            continue;
        }
        // Only the true literal can be caused or affect anyone.
        let v = ctx.true_literal(var)?;
        if !ctx.affects_any(&v, patient)? {
            continue;
        }
        if !ctx.butfor_cause(&action, &Formula::literal(&v))? {
            continue;
        }
        let on_goal_path = match reading {
            Reading::Two => true,
            Reading::One => {
                let mut found = false;
                for g in ctx.goals() {
                    if ctx.butfor_cause(&v, &Formula::literal(g))? {
                        found = true;
                        break;
                    }
                }
                found
            }
        };
        if on_goal_path {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

pub fn treated_as_end(model: &CheckedModel, situation: &Situation, patient: &str) -> Result<bool, EngineError> {
    let ctx = Context::new(model, situation, &Intervention::none())?;
    Ok(end_assessment(&ctx, patient)?.treated_as_end())
}

/// `Some(witness)` if the patient is treated as a means.
pub fn treated_as_means(
    model: &CheckedModel,
    situation: &Situation,
    patient: &str,
    reading: Reading,
) -> Result<Option<Literal>, EngineError> {
    let ctx = Context::new(model, situation, &Intervention::none())?;
    means_witness(&ctx, patient, reading)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub patient: String,
    pub means_witness: Literal,
    pub end_failures: Vec<EndFailure>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reasons: Vec<String> = self.end_failures.iter().map(ToString::to_string).collect();
        write!(
            f,
            "{} is treated as a means (affected by {}) but not as an end: {}",
            self.patient,
            self.means_witness,
            reasons.join(", ")
        )
    }
}

/// Outcome of the categorical imperative check. Permissible iff there are
/// no violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub action: String,
    pub reading: Reading,
    pub permissible: bool,
    pub violations: Vec<Violation>,
}

/// Checks `Means(p) -> End(p)` for every patient, in declaration order.
pub fn ci_verdict(ctx: &Context<'_>, reading: Reading) -> Result<Verdict, EngineError> {
    let mut violations = Vec::new();
    for patient in &ctx.model().model().patients {
        let Some(witness) = means_witness(ctx, patient, reading)? else {
            continue;
        };
        let end = end_assessment(ctx, patient)?;
        if !end.treated_as_end() {
            violations.push(Violation {
                patient: patient.clone(),
                means_witness: witness,
                end_failures: end.failures(),
            });
        }
    }
    Ok(Verdict {
        action: ctx.situation().action().to_string(),
        reading,
        permissible: violations.is_empty(),
        violations,
    })
}

pub fn ci_permissible(model: &CheckedModel, situation: &Situation, reading: Reading) -> Result<Verdict, EngineError> {
    let ctx = Context::new(model, situation, &Intervention::none())?;
    ci_verdict(&ctx, reading)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeritOptions {
    /// Only actions permitted by the categorical imperative compete.
    pub permitted_only: bool,
    /// Among equally meritorious actions prefer those leaving fewer patients
    /// negatively affected by a true consequence literal.
    pub tiebreak_negative: bool,
}

impl Default for MeritOptions {
    fn default() -> Self {
        MeritOptions {
            permitted_only: true,
            tiebreak_negative: false,
        }
    }
}

/// Per-action scores used by [`meritorious`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeritScore {
    pub action: String,
    pub permissible: bool,
    /// Patients some true goal affects positively. A patient also affected
    /// negatively by another goal still counts.
    pub advanced: BTreeSet<String>,
    /// Patients negatively affected by some true consequence literal.
    pub harmed: BTreeSet<String>,
}

pub fn merit_scores(
    model: &CheckedModel,
    background: &BTreeMap<String, bool>,
    reading: Reading,
) -> Result<Vec<MeritScore>, EngineError> {
    let m = model.model();
    let mut actions: Vec<&String> = m.actions.iter().collect();
    actions.sort();
    let mut out = Vec::with_capacity(actions.len());
    for action in actions {
        let situation = model.situation(action, background)?;
        let ctx = Context::new(model, &situation, &Intervention::none())?;
        let permissible = ci_verdict(&ctx, reading)?.permissible;
        let mut advanced = BTreeSet::new();
        for p in &m.patients {
            for g in ctx.goals() {
                if ctx.affects(g, p, Sign::Positive)? {
                    advanced.insert(p.clone());
                }
            }
        }
        let mut harmed = BTreeSet::new();
        for c in &m.consequences {
            let lit = ctx.true_literal(c)?;
            for a in m.affects.iter().filter(|a| a.literal == lit && a.sign == Sign::Negative) {
                harmed.insert(a.patient.clone());
            }
        }
        out.push(MeritScore {
            action: action.clone(),
            permissible,
            advanced,
            harmed,
        });
    }
    Ok(out)
}

/// Every action maximising the number of positively advanced patients among
/// the competing actions. Empty when no action is permissible.
pub fn meritorious(
    model: &CheckedModel,
    background: &BTreeMap<String, bool>,
    reading: Reading,
    options: MeritOptions,
) -> Result<BTreeSet<String>, EngineError> {
    let scores = merit_scores(model, background, reading)?;
    let candidates: Vec<&MeritScore> = scores
        .iter()
        .filter(|s| s.permissible || !options.permitted_only)
        .collect();
    let key = |s: &MeritScore| {
        let harm = if options.tiebreak_negative { s.harmed.len() } else { 0 };
        (s.advanced.len(), std::cmp::Reverse(harm))
    };
    let Some(best) = candidates.iter().map(|s| key(s)).max() else {
        return Ok(BTreeSet::new());
    };
    Ok(candidates
        .into_iter()
        .filter(|s| key(s) == best)
        .map(|s| s.action.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_mechanism;
    use crate::model::{Affect, Model};

    fn bg(pairs: &[(&str, bool)]) -> BTreeMap<String, bool> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn suicide() -> CheckedModel {
        CheckedModel::new(Model {
            actions: vec!["suicide".into()],
            consequences: vec!["dead".into()],
            patients: vec!["Bob".into()],
            mechanisms: [("dead".to_string(), parse_mechanism("suicide").unwrap())].into(),
            affects: vec![Affect::new(Literal::pos("suicide"), "Bob", Sign::Positive)],
            goals: [("suicide".to_string(), vec![Literal::pos("dead")])].into(),
            ..Model::default()
        })
        .unwrap()
    }

    fn amputation() -> CheckedModel {
        CheckedModel::new(Model {
            actions: vec!["amputate".into()],
            consequences: vec!["survives".into()],
            patients: vec!["Bob".into()],
            mechanisms: [("survives".to_string(), parse_mechanism("amputate").unwrap())].into(),
            affects: vec![
                Affect::new(Literal::pos("amputate"), "Bob", Sign::Negative),
                Affect::new(Literal::pos("survives"), "Bob", Sign::Positive),
            ],
            goals: [("amputate".to_string(), vec![Literal::pos("survives")])].into(),
            ..Model::default()
        })
        .unwrap()
    }

    #[test]
    fn suicide_case() {
        let m = suicide();
        let w = m.situation("suicide", &bg(&[])).unwrap();
        assert_eq!(
            treated_as_means(&m, &w, "Bob", Reading::One).unwrap(),
            Some(Literal::pos("suicide"))
        );
        assert!(!treated_as_end(&m, &w, "Bob").unwrap());
        let v = ci_permissible(&m, &w, Reading::One).unwrap();
        assert!(!v.permissible);
        assert_eq!(
            v.violations,
            vec![Violation {
                patient: "Bob".into(),
                means_witness: Literal::pos("suicide"),
                end_failures: vec![EndFailure::NoPositiveGoal],
            }]
        );
    }

    #[test]
    fn amputation_case() {
        let m = amputation();
        let w = m.situation("amputate", &bg(&[])).unwrap();
        assert!(treated_as_end(&m, &w, "Bob").unwrap());
        for r in Reading::ALL {
            assert!(treated_as_means(&m, &w, "Bob", r).unwrap().is_some());
            assert!(ci_permissible(&m, &w, r).unwrap().permissible);
        }
    }

    #[test]
    fn unknown_patient() {
        let m = suicide();
        let w = m.situation("suicide", &bg(&[])).unwrap();
        assert_eq!(
            treated_as_end(&m, &w, "Alice"),
            Err(EngineError::UnknownPatient("Alice".into()))
        );
        assert_eq!(
            treated_as_means(&m, &w, "Alice", Reading::Two),
            Err(EngineError::UnknownPatient("Alice".into()))
        );
    }

    #[test]
    fn empty_goals_never_treat_as_end() {
        let m = CheckedModel::new(Model {
            actions: vec!["act".into(), "idle".into()],
            consequences: vec!["c".into()],
            patients: vec!["P".into()],
            mechanisms: [("c".to_string(), parse_mechanism("act").unwrap())].into(),
            affects: vec![Affect::new(Literal::pos("c"), "P", Sign::Negative)],
            ..Model::default()
        })
        .unwrap();
        let w = m.situation("act", &bg(&[])).unwrap();
        assert!(!treated_as_end(&m, &w, "P").unwrap());
        assert!(ci_permissible(&m, &w, Reading::One).unwrap().permissible);
        let v = ci_permissible(&m, &w, Reading::Two).unwrap();
        assert!(!v.permissible);
        assert_eq!(v.violations[0].means_witness, Literal::pos("c"));
    }

    #[test]
    fn meritorious_ties_and_empty() {
        let two_helpers = CheckedModel::new(Model {
            actions: vec!["call".into(), "write".into()],
            consequences: vec!["helped".into()],
            patients: vec!["Ann".into()],
            mechanisms: [("helped".to_string(), parse_mechanism("call | write").unwrap())].into(),
            affects: vec![Affect::new(Literal::pos("helped"), "Ann", Sign::Positive)],
            goals: [
                ("call".to_string(), vec![Literal::pos("helped")]),
                ("write".to_string(), vec![Literal::pos("helped")]),
            ]
            .into(),
            ..Model::default()
        })
        .unwrap();
        let both: BTreeSet<String> = ["call".to_string(), "write".to_string()].into();
        assert_eq!(
            meritorious(&two_helpers, &bg(&[]), Reading::One, MeritOptions::default()).unwrap(),
            both
        );

        let m = suicide();
        assert!(meritorious(&m, &bg(&[]), Reading::One, MeritOptions::default())
            .unwrap()
            .is_empty());
        let all = MeritOptions {
            permitted_only: false,
            ..MeritOptions::default()
        };
        assert_eq!(
            meritorious(&m, &bg(&[]), Reading::One, all).unwrap(),
            BTreeSet::from(["suicide".to_string()])
        );
    }

    #[test]
    fn tiebreak_prefers_less_harm() {
        // Neither action has goals; only the harm count separates them.
        let m = CheckedModel::new(Model {
            actions: vec!["go".into(), "stay".into()],
            background: vec!["storm".into()],
            consequences: vec!["flooded".into()],
            patients: vec!["Ann".into()],
            mechanisms: [("flooded".to_string(), parse_mechanism("storm & stay").unwrap())].into(),
            affects: vec![Affect::new(Literal::pos("flooded"), "Ann", Sign::Negative)],
            ..Model::default()
        })
        .unwrap();
        let b = bg(&[("storm", true)]);
        assert_eq!(meritorious(&m, &b, Reading::One, MeritOptions::default()).unwrap().len(), 2);
        let opts = MeritOptions {
            tiebreak_negative: true,
            ..MeritOptions::default()
        };
        assert_eq!(
            meritorious(&m, &b, Reading::One, opts).unwrap(),
            BTreeSet::from(["go".to_string()])
        );
    }

    #[test]
    fn reading_parse_and_display() {
        assert_eq!("1".parse::<Reading>().unwrap(), Reading::One);
        assert_eq!("Reading-2".parse::<Reading>().unwrap(), Reading::Two);
        assert!("3".parse::<Reading>().is_err());
        assert_eq!(Reading::Two.to_string(), "Reading-2");
    }
}
