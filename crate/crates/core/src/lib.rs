//! Model checker for Kantian causal agency models.
//!
//! A model lists actions, background conditions and consequences, boolean
//! structural equations for the consequences, the goals of each action, the
//! moral patients, and which literals affect which patients for better or
//! worse. Given a situation (one performed action plus background values)
//! the checker evaluates the equations, answers but-for causal queries, and
//! decides whether the action treats everyone it uses as a means also as an
//! end.
//!
//! ```
//! use kantian::{ci_permissible, model_from_json, Reading};
//!
//! let model = model_from_json(r#"{
//!     "actions": ["suicide"], "background": [], "consequences": ["dead"],
//!     "patients": ["Bob"], "mechanisms": {"dead": "suicide"},
//!     "affects": {"suicide": [["Bob", "+"]], "dead": []},
//!     "goals": {"suicide": ["dead"]}
//! }"#).unwrap();
//! let w = model.situation("suicide", &Default::default()).unwrap();
//! assert!(!ci_permissible(&model, &w, Reading::One).unwrap().permissible);
//! ```

pub mod document;
pub mod engine;
pub mod lang;
pub mod model;
pub mod oracle;
pub mod principles;
pub mod report;

pub use document::{load_model, model_from_json, model_to_json, LoadError, ModelDocument};
pub use engine::{
    build_dependence_graph, butfor_cause, depends, direct_consequences, evaluate, satisfies, Assignment,
    CheckedModel, Context, DependenceGraph, EngineError, InvalidModel,
};
pub use lang::{parse_mechanism, parse_query, render_formula_text, render_mechanism, BoolExpr, Formula, ParseError};
pub use model::{
    make_situation, validate_model, Affect, Diagnostic, Intervention, Kind, Literal, Model, Severity, Sign,
    Situation, SituationError,
};
pub use principles::{
    ci_permissible, ci_verdict, merit_scores, meritorious, treated_as_end, treated_as_means, EndAssessment,
    EndFailure, MeritOptions, MeritScore, Reading, Verdict, Violation,
};
pub use report::{render_text, VerdictReport};
