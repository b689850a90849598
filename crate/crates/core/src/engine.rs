//! Semantic core: dependence, stratified evaluation under interventions,
//! but-for causation, direct consequences and formula satisfaction.
//!
//! But-for causation is deliberately the simple counterfactual test. It does
//! not handle preemption: if the victim was already poisoned, the shot is not
//! a but-for cause of death.
//!
//! ```
//! use std::collections::BTreeMap;
//! use kantian::{parse_mechanism, parse_query, CheckedModel, Intervention, Literal, Model};
//!
//! let model = Model {
//!     actions: vec!["shoot".into(), "hold_fire".into()],
//!     background: vec!["poisoned".into()],
//!     consequences: vec!["dead".into()],
//!     mechanisms: [("dead".to_string(), parse_mechanism("shoot | poisoned").unwrap())].into(),
//!     ..Model::default()
//! };
//! let model = CheckedModel::new(model).unwrap();
//! let w = model.situation("shoot", &BTreeMap::from([("poisoned".to_string(), true)])).unwrap();
//! let dead = parse_query("dead").unwrap();
//! let shot_caused_death =
//!     kantian::butfor_cause(&model, &w, &Intervention::none(), &Literal::pos("shoot"), &dead).unwrap();
//! assert!(!shot_caused_death);
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::lang::{BoolExpr, Formula};
use crate::model::{
    make_situation, validate_model, Diagnostic, Intervention, Kind, Literal, Model, Sign, Situation,
    SituationError, MAX_MECHANISM_VARIABLES,
};
use crate::principles;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("{0} is not a consequence variable")]
    NotAConsequence(String),
    #[error("dependence of {0} on itself is undefined")]
    SameVariable(String),
    #[error("consequence {0} has no mechanism")]
    MissingMechanism(String),
    #[error("mechanism for {0} mentions {1} variables (limit {MAX_MECHANISM_VARIABLES})")]
    TooManyVariables(String, usize),
    #[error("dependence cycle through {}", .0.join(", "))]
    CyclicModel(Vec<String>),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("unknown patient {0}")]
    UnknownPatient(String),
    #[error("the effect of a but-for cause may not contain Causes, Means or End")]
    AgencyPredicateInEffect,
    #[error(transparent)]
    Situation(#[from] SituationError),
}

/// The model failed validation; carries every diagnostic, warnings included.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid model: {}", .0.iter().filter(|d| d.is_error()).map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidModel(pub Vec<Diagnostic>);

/// Whether consequence `vi` depends on `vj`: some assignment of the other
/// inputs makes the mechanism of `vi` differ between `vj = 0` and `vj = 1`.
///
/// Only variables that occur in the mechanism are enumerated; any other
/// variable cannot change its value.
pub fn depends(model: &Model, vi: &str, vj: &str) -> Result<bool, EngineError> {
    if model.kind_of(vi) != Some(Kind::Consequence) {
        return Err(EngineError::NotAConsequence(vi.to_string()));
    }
    if vi == vj {
        return Err(EngineError::SameVariable(vi.to_string()));
    }
    let mechanism = model
        .mechanisms
        .get(vi)
        .ok_or_else(|| EngineError::MissingMechanism(vi.to_string()))?;
    semantic_dependence(vi, mechanism, vj)
}

fn semantic_dependence(target: &str, mechanism: &BoolExpr, vj: &str) -> Result<bool, EngineError> {
    let vars = mechanism.variables();
    if !vars.contains(vj) {
        return Ok(false);
    }
    if vars.len() > MAX_MECHANISM_VARIABLES {
        return Err(EngineError::TooManyVariables(target.to_string(), vars.len()));
    }
    let others: Vec<&str> = vars.iter().map(String::as_str).filter(|v| *v != vj).collect();
    for mask in 0u32..(1u32 << others.len()) {
        let at = |flip: bool| {
            mechanism.eval(&|name: &str| {
                if name == vj {
                    flip
                } else {
                    let i = others.iter().position(|o| *o == name).unwrap_or(0);
                    mask >> i & 1 == 1
                }
            })
        };
        if at(false) != at(true) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Semantic dependence edges plus a cached topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceGraph {
    parents: BTreeMap<String, BTreeSet<String>>,
    order: Vec<String>,
}

impl DependenceGraph {
    /// All variables, each after everything it depends on; ties broken by
    /// name.
    pub fn order(&self) -> &[String] {
        &self.order
    }

    /// Variables `var` directly depends on.
    pub fn parents(&self, var: &str) -> impl Iterator<Item = &str> {
        self.parents.get(var).into_iter().flatten().map(String::as_str)
    }

    /// `(from, to)` pairs: `to` depends on `from`.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.parents
            .iter()
            .flat_map(|(to, ps)| ps.iter().map(move |from| (from.as_str(), to.as_str())))
    }

    pub fn in_degree(&self, var: &str) -> usize {
        self.parents.get(var).map_or(0, BTreeSet::len)
    }
}

/// Builds the dependence graph, failing with a witness cycle if the model is
/// not acyclic. The witness lists each variable once, starting from the
/// smallest name, with each element depending on the next.
///
/// Mentions of undeclared variables and self-references are ignored here;
/// [`validate_model`] reports them.
pub fn build_dependence_graph(model: &Model) -> Result<DependenceGraph, EngineError> {
    let declared: BTreeSet<&str> = model.variables().map(|(n, _)| n).collect();
    let mut parents: BTreeMap<String, BTreeSet<String>> =
        declared.iter().map(|n| (n.to_string(), BTreeSet::new())).collect();
    for c in &model.consequences {
        let Some(mechanism) = model.mechanisms.get(c) else {
            continue;
        };
        for v in mechanism.variables() {
            if v != *c && declared.contains(v.as_str()) && semantic_dependence(c, mechanism, &v)? {
                parents.get_mut(c).expect("declared").insert(v);
            }
        }
    }

    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut pending: BTreeMap<&str, usize> = BTreeMap::new();
    for (node, ps) in &parents {
        pending.insert(node, ps.len());
        for p in ps {
            children.entry(p).or_default().push(node);
        }
    }
    let mut ready: BTreeSet<&str> = pending.iter().filter(|(_, &d)| d == 0).map(|(n, _)| *n).collect();
    let mut order = Vec::with_capacity(parents.len());
    while let Some(node) = ready.pop_first() {
        order.push(node.to_string());
        pending.remove(node);
        for child in children.get(node).into_iter().flatten() {
            let d = pending.get_mut(child).expect("unprocessed child");
            *d -= 1;
            if *d == 0 {
                ready.insert(child);
            }
        }
    }

    if pending.is_empty() {
        return Ok(DependenceGraph { parents, order });
    }

    // Every leftover node still has a leftover parent, so walking parents
    // must revisit a node.
    let mut walk: Vec<&str> = Vec::new();
    let mut at = *pending.keys().next().expect("non-empty");
    while !walk.contains(&at) {
        walk.push(at);
        at = parents[at]
            .iter()
            .map(String::as_str)
            .find(|p| pending.contains_key(p))
            .expect("leftover node has a leftover parent");
    }
    let start = walk.iter().position(|n| *n == at).expect("revisited");
    let mut cycle: Vec<String> = walk[start..].iter().map(|s| s.to_string()).collect();
    let min = cycle
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    cycle.rotate_left(min);
    Err(EngineError::CyclicModel(cycle))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Var(usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
}

impl Node {
    fn compile(e: &BoolExpr, index: &HashMap<String, usize>) -> Node {
        match e {
            BoolExpr::Var(v) => Node::Var(index[v]),
            BoolExpr::Not(e) => Node::Not(Box::new(Node::compile(e, index))),
            BoolExpr::And(l, r) => Node::And(Box::new(Node::compile(l, index)), Box::new(Node::compile(r, index))),
            BoolExpr::Or(l, r) => Node::Or(Box::new(Node::compile(l, index)), Box::new(Node::compile(r, index))),
        }
    }

    fn eval(&self, values: &[bool]) -> bool {
        match self {
            Node::Var(i) => values[*i],
            Node::Not(e) => !e.eval(values),
            Node::And(l, r) => l.eval(values) && r.eval(values),
            Node::Or(l, r) => l.eval(values) || r.eval(values),
        }
    }
}

/// A model that passed validation, with its dependence graph and compiled
/// mechanisms. Immutable; share it freely between threads.
#[derive(Debug, Clone)]
pub struct CheckedModel {
    model: Model,
    graph: DependenceGraph,
    warnings: Vec<Diagnostic>,
    names: Vec<String>,
    kinds: Vec<Kind>,
    index: HashMap<String, usize>,
    // Variable indices in evaluation order.
    schedule: Vec<usize>,
    mechanisms: Vec<Option<Node>>,
}

impl CheckedModel {
    pub fn new(model: Model) -> Result<Self, InvalidModel> {
        let diagnostics = validate_model(&model);
        if diagnostics.iter().any(Diagnostic::is_error) {
            return Err(InvalidModel(diagnostics));
        }
        let graph = build_dependence_graph(&model).map_err(|e| {
            InvalidModel(vec![Diagnostic::error("mechanisms", e.to_string())])
        })?;
        let (names, kinds): (Vec<String>, Vec<Kind>) =
            model.variables().map(|(n, k)| (n.to_string(), k)).unzip();
        let index: HashMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let schedule = graph.order().iter().map(|n| index[n]).collect();
        let mechanisms = names
            .iter()
            .zip(&kinds)
            .map(|(n, k)| match k {
                Kind::Consequence => Some(Node::compile(&model.mechanisms[n], &index)),
                _ => None,
            })
            .collect();
        Ok(CheckedModel {
            model,
            graph,
            warnings: diagnostics,
            names,
            kinds,
            index,
            schedule,
            mechanisms,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn graph(&self) -> &DependenceGraph {
        &self.graph
    }

    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    pub fn kind_of(&self, var: &str) -> Option<Kind> {
        self.index.get(var).map(|&i| self.kinds[i])
    }

    pub fn situation(&self, action: &str, background: &BTreeMap<String, bool>) -> Result<Situation, SituationError> {
        make_situation(&self.model, action, background)
    }

    fn var_index(&self, var: &str) -> Result<usize, EngineError> {
        self.index
            .get(var)
            .copied()
            .ok_or_else(|| EngineError::UnknownVariable(var.to_string()))
    }

    fn check_patient(&self, patient: &str) -> Result<(), EngineError> {
        if self.model.has_patient(patient) {
            Ok(())
        } else {
            Err(EngineError::UnknownPatient(patient.to_string()))
        }
    }

    fn values(&self, situation: &Situation, intervention: &Intervention) -> Result<Vec<bool>, EngineError> {
        let mut forced: Vec<Option<bool>> = vec![None; self.names.len()];
        for lit in intervention.literals() {
            forced[self.var_index(&lit.var)?] = Some(lit.positive);
        }
        if self.kind_of(situation.action()) != Some(Kind::Action) {
            return Err(SituationError::UnknownAction(situation.action().to_string()).into());
        }
        let mut values = vec![false; self.names.len()];
        for &i in &self.schedule {
            values[i] = match (forced[i], self.kinds[i]) {
                (Some(v), _) => v,
                (None, Kind::Action) => self.names[i] == situation.action(),
                (None, Kind::Background) => *situation
                    .background()
                    .get(&self.names[i])
                    .ok_or_else(|| SituationError::MissingBackground(self.names[i].clone()))?,
                (None, Kind::Consequence) => self.mechanisms[i].as_ref().expect("compiled").eval(&values),
            };
        }
        Ok(values)
    }
}

/// A total truth assignment to every variable of the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, bool>);

impl Assignment {
    pub fn get(&self, var: &str) -> Option<bool> {
        self.0.get(var).copied()
    }

    pub fn holds(&self, lit: &Literal) -> Option<bool> {
        self.get(&lit.var).map(|v| lit.holds_for(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn into_map(self) -> BTreeMap<String, bool> {
        self.0
    }
}

/// One evaluated point `M_X, w_a`: a model, a situation and an intervention,
/// with the resulting assignment cached.
#[derive(Debug, Clone)]
pub struct Context<'a> {
    model: &'a CheckedModel,
    situation: &'a Situation,
    intervention: Intervention,
    values: Vec<bool>,
}

impl<'a> Context<'a> {
    pub fn new(
        model: &'a CheckedModel,
        situation: &'a Situation,
        intervention: &Intervention,
    ) -> Result<Self, EngineError> {
        let values = model.values(situation, intervention)?;
        Ok(Context {
            model,
            situation,
            intervention: intervention.clone(),
            values,
        })
    }

    pub fn model(&self) -> &'a CheckedModel {
        self.model
    }

    pub fn situation(&self) -> &'a Situation {
        self.situation
    }

    pub fn intervention(&self) -> &Intervention {
        &self.intervention
    }

    /// Same situation, different intervention.
    pub fn under(&self, intervention: &Intervention) -> Result<Context<'a>, EngineError> {
        Context::new(self.model, self.situation, intervention)
    }

    pub fn assignment(&self) -> Assignment {
        Assignment(self.model.names.iter().cloned().zip(self.values.iter().copied()).collect())
    }

    pub fn value(&self, var: &str) -> Result<bool, EngineError> {
        Ok(self.values[self.model.var_index(var)?])
    }

    pub fn holds(&self, lit: &Literal) -> Result<bool, EngineError> {
        Ok(lit.holds_for(self.value(&lit.var)?))
    }

    /// The literal over `var` that is true here.
    pub fn true_literal(&self, var: &str) -> Result<Literal, EngineError> {
        Ok(Literal::new(var, self.value(var)?))
    }

    /// The performed action as a positive literal.
    pub fn action_literal(&self) -> Literal {
        Literal::pos(self.situation.action())
    }

    pub fn is_goal(&self, lit: &Literal) -> bool {
        self.goals().contains(lit)
    }

    pub fn goals(&self) -> &'a [Literal] {
        self.model.model.goals_of(self.situation.action())
    }

    /// `lit ▷ patient` with the given sign: the triple is in the affect
    /// relation and `lit` actually holds.
    pub fn affects(&self, lit: &Literal, patient: &str, sign: Sign) -> Result<bool, EngineError> {
        self.model.check_patient(patient)?;
        self.model.var_index(&lit.var)?;
        let listed = self
            .model
            .model
            .affects
            .iter()
            .any(|a| a.literal == *lit && a.patient == patient && a.sign == sign);
        Ok(listed && self.holds(lit)?)
    }

    /// `lit ▷ patient` with either sign.
    pub fn affects_any(&self, lit: &Literal, patient: &str) -> Result<bool, EngineError> {
        Ok(self.affects(lit, patient, Sign::Positive)? || self.affects(lit, patient, Sign::Negative)?)
    }

    /// `y ⇝ phi`: both hold here, and forcing `¬y` (in place of `y`) makes
    /// `phi` false.
    pub fn butfor_cause(&self, y: &Literal, phi: &Formula) -> Result<bool, EngineError> {
        if phi.has_agency_predicate() {
            return Err(EngineError::AgencyPredicateInEffect);
        }
        if !(self.holds(y)? && self.satisfies(phi)?) {
            return Ok(false);
        }
        let counterfactual = self.under(&self.intervention.flipped(y))?;
        Ok(!counterfactual.satisfies(phi)?)
    }

    /// Consequence literals that `v` is a but-for cause of, in evaluation
    /// order.
    pub fn direct_consequences(&self, v: &Literal) -> Result<Vec<Literal>, EngineError> {
        self.model.var_index(&v.var)?;
        if !self.holds(v)? {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for &i in &self.model.schedule {
            if self.model.kinds[i] != Kind::Consequence {
                continue;
            }
            let lit = Literal::new(self.model.names[i].clone(), self.values[i]);
            if self.butfor_cause(v, &Formula::literal(&lit))? {
                out.push(lit);
            }
        }
        Ok(out)
    }

    pub fn satisfies(&self, formula: &Formula) -> Result<bool, EngineError> {
        Ok(match formula {
            Formula::Var(v) => self.value(v)?,
            Formula::Not(f) => !self.satisfies(f)?,
            Formula::And(l, r) => self.satisfies(l)? && self.satisfies(r)?,
            Formula::Or(l, r) => self.satisfies(l)? || self.satisfies(r)?,
            Formula::Implies(l, r) => !self.satisfies(l)? || self.satisfies(r)?,
            Formula::Goal(lit) => {
                self.model.var_index(&lit.var)?;
                self.is_goal(lit)
            }
            Formula::Affects(lit, p, s) => self.affects(lit, p, *s)?,
            Formula::Causes(y, phi) => self.butfor_cause(y, phi)?,
            Formula::Means(reading, p) => principles::means_witness(self, p, *reading)?.is_some(),
            Formula::End(p) => principles::end_assessment(self, p)?.treated_as_end(),
        })
    }
}

pub fn evaluate(
    model: &CheckedModel,
    situation: &Situation,
    intervention: &Intervention,
) -> Result<Assignment, EngineError> {
    Ok(Context::new(model, situation, intervention)?.assignment())
}

pub fn butfor_cause(
    model: &CheckedModel,
    situation: &Situation,
    intervention: &Intervention,
    y: &Literal,
    phi: &Formula,
) -> Result<bool, EngineError> {
    Context::new(model, situation, intervention)?.butfor_cause(y, phi)
}

pub fn direct_consequences(
    model: &CheckedModel,
    situation: &Situation,
    intervention: &Intervention,
    v: &Literal,
) -> Result<Vec<Literal>, EngineError> {
    Context::new(model, situation, intervention)?.direct_consequences(v)
}

pub fn satisfies(
    model: &CheckedModel,
    situation: &Situation,
    intervention: &Intervention,
    formula: &Formula,
) -> Result<bool, EngineError> {
    Context::new(model, situation, intervention)?.satisfies(formula)
}
