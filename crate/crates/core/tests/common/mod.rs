#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use kantian::{
    load_model, Affect, BoolExpr, CheckedModel, Formula, Literal, Model, Reading, Sign, Situation,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> CheckedModel {
    load_model(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub const FIXTURES: &[&str] = &[
    "suicide.json",
    "amputation.json",
    "flowers.json",
    "flowers_star.json",
    "false_promise.json",
    "trolley.json",
    "drowning.json",
    "light_switch.json",
    "poisoning.json",
    "laziness.json",
];

pub fn bg(pairs: &[(&str, bool)]) -> BTreeMap<String, bool> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_expr(rng: &mut ChaCha8Rng, vars: &[String], depth: u32) -> BoolExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return BoolExpr::var(vars.choose(rng).expect("non-empty").clone());
    }
    match rng.gen_range(0..3) {
        0 => BoolExpr::not(random_expr(rng, vars, depth - 1)),
        1 => BoolExpr::and(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)),
        _ => BoolExpr::or(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)),
    }
}

fn random_literal(rng: &mut ChaCha8Rng, vars: &[String]) -> Literal {
    Literal::new(vars.choose(rng).expect("non-empty").clone(), rng.gen_bool(0.5))
}

/// 1-3 actions, 0-2 background variables, 0-5 consequences whose mechanisms
/// are depth-3 trees over earlier variables only (acyclic by construction),
/// 1-3 patients, random affects over A ∪ C and random goals.
pub fn random_model(rng: &mut ChaCha8Rng) -> Model {
    let actions: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("a{i}")).collect();
    let background: Vec<String> = (0..rng.gen_range(0..=2)).map(|i| format!("b{i}")).collect();
    let consequences: Vec<String> = (0..rng.gen_range(0..=5)).map(|i| format!("c{i}")).collect();
    let patients: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("p{i}")).collect();

    let mut earlier: Vec<String> = actions.iter().chain(&background).cloned().collect();
    let mut mechanisms = BTreeMap::new();
    for c in &consequences {
        mechanisms.insert(c.clone(), random_expr(rng, &earlier, 3));
        earlier.push(c.clone());
    }

    let affectable: Vec<String> = actions.iter().chain(&consequences).cloned().collect();
    let mut affects = Vec::new();
    for var in &affectable {
        for positive in [true, false] {
            if rng.gen_bool(0.35) {
                let sign = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
                let patient = patients.choose(rng).expect("non-empty").clone();
                let affect = Affect::new(Literal::new(var.clone(), positive), patient, sign);
                if !affects.contains(&affect) {
                    affects.push(affect);
                }
            }
        }
    }

    let all: Vec<String> = earlier.clone();
    let mut goals = BTreeMap::new();
    for a in &actions {
        let n = rng.gen_range(0..=2);
        let mut gs: Vec<Literal> = Vec::new();
        for _ in 0..n {
            let pool = if consequences.is_empty() || rng.gen_bool(0.2) { &all } else { &consequences };
            let g = random_literal(rng, pool);
            if !gs.contains(&g) {
                gs.push(g);
            }
        }
        goals.insert(a.clone(), gs);
    }

    Model {
        actions,
        background,
        consequences,
        mechanisms,
        goals,
        patients,
        affects,
    }
}

pub fn random_background(rng: &mut ChaCha8Rng, model: &Model) -> BTreeMap<String, bool> {
    model.background.iter().map(|b| (b.clone(), rng.gen_bool(0.5))).collect()
}

pub fn random_situation(rng: &mut ChaCha8Rng, model: &CheckedModel) -> Situation {
    let m = model.model();
    let action = m.actions.choose(rng).expect("actions").clone();
    let background = random_background(rng, m);
    model.situation(&action, &background).expect("well-formed situation")
}

pub fn random_guess(rng: &mut ChaCha8Rng, model: &Model) -> BTreeMap<String, bool> {
    model.consequences.iter().map(|c| (c.clone(), rng.gen_bool(0.5))).collect()
}

const NAMES: &[&str] = &["a", "b", "press", "drown", "_x1", "Goal", "survive6"];
const PATIENTS: &[&str] = &["Bob", "Alice", "person_6", "Mary Ann", "42"];

pub fn random_mechanism_ast(rng: &mut ChaCha8Rng, depth: u32) -> BoolExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return BoolExpr::var(*NAMES.choose(rng).unwrap());
    }
    match rng.gen_range(0..3) {
        0 => BoolExpr::not(random_mechanism_ast(rng, depth - 1)),
        1 => BoolExpr::and(random_mechanism_ast(rng, depth - 1), random_mechanism_ast(rng, depth - 1)),
        _ => BoolExpr::or(random_mechanism_ast(rng, depth - 1), random_mechanism_ast(rng, depth - 1)),
    }
}

fn random_name_literal(rng: &mut ChaCha8Rng) -> Literal {
    Literal::new(*NAMES.choose(rng).unwrap(), rng.gen_bool(0.5))
}

/// Random query tree; `agency` allows Causes, Means and End.
pub fn random_formula_ast(rng: &mut ChaCha8Rng, depth: u32, agency: bool) -> Formula {
    let leaf_count = if agency { 6 } else { 3 };
    if depth == 0 || rng.gen_bool(0.2) {
        let patient = PATIENTS.choose(rng).unwrap().to_string();
        return match rng.gen_range(0..leaf_count) {
            0 => Formula::var(*NAMES.choose(rng).unwrap()),
            1 => Formula::Goal(random_name_literal(rng)),
            2 => {
                let sign = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
                Formula::Affects(random_name_literal(rng), patient, sign)
            }
            3 => Formula::Means(Reading::One, patient),
            4 => Formula::Means(Reading::Two, patient),
            _ => Formula::End(patient),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula_ast(rng, depth - 1, agency);
    let choices = if agency { 5 } else { 4 };
    match rng.gen_range(0..choices) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        _ => {
            let y = random_name_literal(rng);
            Formula::causes(y, random_formula_ast(rng, depth - 1, false))
        }
    }
}

const SOUP: &[&str] = &[
    "a", "b", "!", "&", "|", "->", "-", "+", "(", ")", ",", " ", "\"", "Goal", "Affects", "Causes", "Means1",
    "Means2", "End", "Bob", "\"Bob\"", "∧", "\0", "\n", "x_1", "9",
];

/// Grammar-flavoured noise: mostly valid tokens in random order.
pub fn token_soup(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(0..40);
    (0..n).map(|_| *SOUP.choose(rng).unwrap()).collect()
}

pub fn random_bytes(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let n = rng.gen_range(0..64);
    (0..n).map(|_| rng.gen()).collect()
}
