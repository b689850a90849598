//! Brute-force reference implementations for testing the engine.
//!
//! Nothing here shares evaluation code with [`engine`](crate::engine) or
//! [`principles`](crate::principles): mechanisms are interpreted directly
//! from the expression tree over a name-keyed map, evaluation is a
//! simultaneous fixpoint iteration instead of a topological sweep, and
//! dependence enumerates every variable of the model. Agreement between the
//! two is therefore evidence rather than tautology.
//!
//! Not used by the CLI or by any verdict.

use std::collections::{BTreeMap, BTreeSet};

use crate::lang::BoolExpr;
use crate::model::{Intervention, Kind, Literal, Model, Sign, Situation};
use crate::principles::Reading;

pub const MAX_DEPENDS_VARIABLES: usize = 16;
pub const MAX_MEANS_VARIABLES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large: {0} variables (limit {1})")]
    TooLarge(usize, usize),
    #[error("fixpoint iteration did not converge within {0} rounds")]
    NoConvergence(usize),
    #[error("model is cyclic")]
    Cyclic,
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("unknown patient {0}")]
    UnknownPatient(String),
    #[error("{0} is not a consequence with a mechanism")]
    NotAConsequence(String),
}

type Values = BTreeMap<String, bool>;

fn interpret(e: &BoolExpr, values: &Values) -> bool {
    match e {
        BoolExpr::Var(v) => values.get(v).copied().unwrap_or(false),
        BoolExpr::Not(inner) => !interpret(inner, values),
        BoolExpr::And(l, r) => interpret(l, values) & interpret(r, values),
        BoolExpr::Or(l, r) => interpret(l, values) | interpret(r, values),
    }
}

fn all_variables(model: &Model) -> Vec<String> {
    model
        .actions
        .iter()
        .chain(&model.background)
        .chain(&model.consequences)
        .cloned()
        .collect()
}

/// Full truth-table dependence: flips `vj` under every assignment of all
/// other variables of the model.
pub fn oracle_depends(model: &Model, vi: &str, vj: &str) -> Result<bool, OracleError> {
    let f = model
        .mechanisms
        .get(vi)
        .filter(|_| model.consequences.iter().any(|c| c == vi))
        .ok_or_else(|| OracleError::NotAConsequence(vi.to_string()))?;
    let vars = all_variables(model);
    if vars.len() > MAX_DEPENDS_VARIABLES {
        return Err(OracleError::TooLarge(vars.len(), MAX_DEPENDS_VARIABLES));
    }
    if !vars.iter().any(|v| v == vj) {
        return Err(OracleError::UnknownVariable(vj.to_string()));
    }
    let others: Vec<&String> = vars.iter().filter(|v| *v != vj).collect();
    let mut values: Values = vars.iter().map(|v| (v.clone(), false)).collect();
    for bits in 0u64..(1u64 << others.len()) {
        for (k, v) in others.iter().enumerate() {
            *values.get_mut(*v).expect("declared variable") = bits & (1 << k) != 0;
        }
        *values.get_mut(vj).expect("declared variable") = false;
        let low = interpret(f, &values);
        *values.get_mut(vj).expect("declared variable") = true;
        if interpret(f, &values) != low {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Acyclicity via the transitive closure of `oracle_depends`. Models whose
/// syntactic mention graph is already acyclic are accepted without
/// enumeration.
pub fn oracle_is_acyclic(model: &Model) -> Result<bool, OracleError> {
    let mentions = |c: &str| -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let Some(f) = model.mechanisms.get(c) {
            collect(f, &mut out);
        }
        out
    };
    fn collect(e: &BoolExpr, out: &mut BTreeSet<String>) {
        match e {
            BoolExpr::Var(v) => {
                out.insert(v.clone());
            }
            BoolExpr::Not(i) => collect(i, out),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                collect(l, out);
                collect(r, out);
            }
        }
    }
    let cs = &model.consequences;
    let n = cs.len();
    let at = |name: &str| cs.iter().position(|c| c == name);
    let closure = |edge: &dyn Fn(usize, usize) -> Result<bool, OracleError>| -> Result<bool, OracleError> {
        // reach[i][j]: consequence i is (transitively) modified by consequence j.
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = edge(i, j)?;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
                }
            }
        }
        Ok((0..n).all(|i| !reach[i][i]))
    };
    let syntactic = |i: usize, j: usize| Ok(mentions(&cs[i]).iter().any(|v| at(v) == Some(j)));
    if closure(&syntactic)? {
        return Ok(true);
    }
    let semantic = |i: usize, j: usize| {
        if i == j {
            Ok(false)
        } else {
            oracle_depends(model, &cs[i], &cs[j])
        }
    };
    closure(&semantic)
}

/// Simultaneous fixpoint evaluation from `initial_guess`. Every mechanism is
/// recomputed from the previous round's values until nothing changes; on an
/// acyclic model this takes at most |C| + 1 rounds whatever the guess.
pub fn oracle_evaluate(
    model: &Model,
    situation: &Situation,
    intervention: &Intervention,
    initial_guess: &BTreeMap<String, bool>,
) -> Result<BTreeMap<String, bool>, OracleError> {
    if !oracle_is_acyclic(model)? {
        return Err(OracleError::Cyclic);
    }
    let mut values: Values = BTreeMap::new();
    for v in all_variables(model) {
        let forced = intervention.forced(&v);
        let value = match (forced, model.kind_of(&v)) {
            (Some(b), _) => b,
            (None, Some(Kind::Consequence)) => initial_guess.get(&v).copied().unwrap_or(false),
            (None, _) => situation
                .value_of(model, &v)
                .ok_or_else(|| OracleError::UnknownVariable(v.clone()))?,
        };
        values.insert(v, value);
    }
    for lit in intervention.literals() {
        if !values.contains_key(&lit.var) {
            return Err(OracleError::UnknownVariable(lit.var));
        }
    }
    let free: Vec<&String> = model
        .consequences
        .iter()
        .filter(|c| intervention.forced(c).is_none())
        .collect();
    let bound = model.consequences.len() + 1;
    for _ in 0..bound {
        let next: Vec<(String, bool)> = free
            .iter()
            .map(|c| ((*c).clone(), interpret(&model.mechanisms[*c], &values)))
            .collect();
        let mut changed = false;
        for (c, v) in next {
            if values.insert(c, v) != Some(v) {
                changed = true;
            }
        }
        if !changed {
            return Ok(values);
        }
    }
    Err(OracleError::NoConvergence(bound))
}

/// Means by exhaustive search: every literal over A ∪ C is tried as the
/// intermediate, each but-for test re-evaluating the model from scratch.
pub fn oracle_means(model: &Model, situation: &Situation, patient: &str, reading: Reading) -> Result<bool, OracleError> {
    let candidates: Vec<String> = model.actions.iter().chain(&model.consequences).cloned().collect();
    if candidates.len() > MAX_MEANS_VARIABLES {
        return Err(OracleError::TooLarge(candidates.len(), MAX_MEANS_VARIABLES));
    }
    if !model.patients.iter().any(|p| p == patient) {
        return Err(OracleError::UnknownPatient(patient.to_string()));
    }
    let guess = BTreeMap::new();
    let base = oracle_evaluate(model, situation, &Intervention::default(), &guess)?;
    let lit_true = |vals: &Values, l: &Literal| vals.get(&l.var).copied() == Some(l.positive);
    let cause = |y: &Literal, effect: &Literal| -> Result<bool, OracleError> {
        if !(lit_true(&base, y) && lit_true(&base, effect)) {
            return Ok(false);
        }
        let flipped = Intervention::new([y.negate()]).expect("single literal");
        let alt = oracle_evaluate(model, situation, &flipped, &guess)?;
        Ok(!lit_true(&alt, effect))
    };
    let action = Literal::pos(situation.action());
    let goals = model.goals.get(situation.action()).cloned().unwrap_or_default();

    for var in &candidates {
        for positive in [true, false] {
            let v = Literal::new(var.clone(), positive);
            let affected = model.affects.iter().any(|a| {
                a.literal == v && a.patient == patient && matches!(a.sign, Sign::Positive | Sign::Negative)
            }) && lit_true(&base, &v);
            if !affected || !cause(&action, &v)? {
                continue;
            }
            match reading {
                Reading::Two => return Ok(true),
                Reading::One => {
                    for g in &goals {
                        if cause(&v, g)? {
                            return Ok(true);
                        }
                    }
                }
            }
        }
    }
    Ok(false)
}
