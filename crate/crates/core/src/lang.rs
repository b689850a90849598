//! Concrete syntax for mechanisms and queries.
//!
//! Mechanisms:
//!
//! ```text
//! expr     := or_expr
//! or_expr  := and_expr ('|' and_expr)*
//! and_expr := unary ('&' unary)*
//! unary    := '!' unary | '(' expr ')' | ident
//! ident    := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! Queries extend this with implication (`->`, lowest precedence, right
//! associative) and the predicates `Goal(lit)`, `Affects(lit, patient, +|-)`,
//! `Causes(lit, formula)`, `Means1(patient)`, `Means2(patient)` and
//! `End(patient)`. A literal is an identifier with an optional leading `!`;
//! a patient is an identifier or a double-quoted string.
//!
//! `&` and `|` are left associative; the renderer parenthesises so that
//! `parse(render(t)) == t` for every tree.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::{Literal, Sign};
use crate::principles::Reading;

/// Nesting deeper than this is a syntax error rather than a stack overflow.
pub const MAX_NESTING: usize = 256;

/// Boolean mechanism expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Var(String),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(name: impl Into<String>) -> Self {
        BoolExpr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(l: BoolExpr, r: BoolExpr) -> Self {
        BoolExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: BoolExpr, r: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(l), Box::new(r))
    }

    /// Variables occurring syntactically, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            BoolExpr::Var(v) => {
                out.insert(v.clone());
            }
            BoolExpr::Not(e) => e.collect_vars(out),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Evaluates under `lookup`. Unknown variables are the caller's problem;
    /// `lookup` decides what they mean.
    pub fn eval<F>(&self, lookup: &F) -> bool
    where
        F: Fn(&str) -> bool,
    {
        match self {
            BoolExpr::Var(v) => lookup(v),
            BoolExpr::Not(e) => !e.eval(lookup),
            BoolExpr::And(l, r) => l.eval(lookup) && r.eval(lookup),
            BoolExpr::Or(l, r) => l.eval(lookup) || r.eval(lookup),
        }
    }
}

/// Query formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Goal(Literal),
    Affects(Literal, String, Sign),
    Causes(Literal, Box<Formula>),
    Means(Reading, String),
    End(String),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn literal(lit: &Literal) -> Self {
        let atom = Formula::Var(lit.var.clone());
        if lit.positive {
            atom
        } else {
            Formula::not(atom)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn causes(y: Literal, phi: Formula) -> Self {
        Formula::Causes(y, Box::new(phi))
    }

    /// True if the formula mentions `Causes`, `Means` or `End` anywhere.
    /// Such formulas may not appear as the effect of a `Causes`.
    pub fn has_agency_predicate(&self) -> bool {
        match self {
            Formula::Var(_) | Formula::Goal(_) | Formula::Affects(..) => false,
            Formula::Causes(..) | Formula::Means(..) | Formula::End(_) => true,
            Formula::Not(f) => f.has_agency_predicate(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.has_agency_predicate() || r.has_agency_predicate()
            }
        }
    }
}

impl From<&BoolExpr> for Formula {
    fn from(e: &BoolExpr) -> Self {
        match e {
            BoolExpr::Var(v) => Formula::Var(v.clone()),
            BoolExpr::Not(e) => Formula::not(e.as_ref().into()),
            BoolExpr::And(l, r) => Formula::and(l.as_ref().into(), r.as_ref().into()),
            BoolExpr::Or(l, r) => Formula::or(l.as_ref().into(), r.as_ref().into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at byte {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Bang => f.write_str("'!'"),
            Tok::Amp => f.write_str("'&'"),
            Tok::Pipe => f.write_str("'|'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'+' => Tok::Plus,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'-' => Tok::Minus,
            b'"' => {
                let close = src[i + 1..]
                    .find('"')
                    .ok_or_else(|| ParseError::new(start, "unterminated string"))?;
                let s = src[i + 1..i + 1 + close].to_string();
                i += close + 2;
                toks.push((start, Tok::Str(s)));
                continue;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let c = src[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError::new(start, format!("unexpected character {c:?}")));
            }
        };
        i += 1;
        toks.push((start, tok));
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            end: src.len(),
            depth: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(self.offset(), format!("expected {wanted}, found {t}")),
            None => ParseError::new(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of input")),
        }
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            Err(ParseError::new(self.offset(), format!("nesting deeper than {MAX_NESTING}")))
        } else {
            Ok(())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.bump() {
                Some(Tok::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let positive = !self.eat(&Tok::Bang);
        Ok(Literal::new(self.ident()?, positive))
    }

    fn patient(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) | Some(Tok::Str(_)) => match self.bump() {
                Some(Tok::Ident(s)) | Some(Tok::Str(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected("patient name")),
        }
    }

    fn sign(&mut self) -> Result<Sign, ParseError> {
        match self.peek() {
            Some(Tok::Plus) => {
                self.pos += 1;
                Ok(Sign::Positive)
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Sign::Negative)
            }
            _ => Err(self.unexpected("'+' or '-'")),
        }
    }

    // Mechanism grammar.

    fn mech_or(&mut self) -> Result<BoolExpr, ParseError> {
        let mut lhs = self.mech_and()?;
        while self.eat(&Tok::Pipe) {
            lhs = BoolExpr::or(lhs, self.mech_and()?);
        }
        Ok(lhs)
    }

    fn mech_and(&mut self) -> Result<BoolExpr, ParseError> {
        let mut lhs = self.mech_unary()?;
        while self.eat(&Tok::Amp) {
            lhs = BoolExpr::and(lhs, self.mech_unary()?);
        }
        Ok(lhs)
    }

    fn mech_unary(&mut self) -> Result<BoolExpr, ParseError> {
        self.descend()?;
        let e = if self.eat(&Tok::Bang) {
            BoolExpr::not(self.mech_unary()?)
        } else if self.eat(&Tok::LParen) {
            let e = self.mech_or()?;
            self.expect(Tok::RParen)?;
            e
        } else {
            BoolExpr::Var(self.ident()?)
        };
        self.depth -= 1;
        Ok(e)
    }

    // Query grammar.

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.descend()?;
        let lhs = self.query_or()?;
        let f = if self.eat(&Tok::Arrow) {
            Formula::implies(lhs, self.formula()?)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(f)
    }

    fn query_or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.query_and()?;
        while self.eat(&Tok::Pipe) {
            lhs = Formula::or(lhs, self.query_and()?);
        }
        Ok(lhs)
    }

    fn query_and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.query_unary()?;
        while self.eat(&Tok::Amp) {
            lhs = Formula::and(lhs, self.query_unary()?);
        }
        Ok(lhs)
    }

    fn query_unary(&mut self) -> Result<Formula, ParseError> {
        self.descend()?;
        let f = if self.eat(&Tok::Bang) {
            Formula::not(self.query_unary()?)
        } else if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            f
        } else if matches!(self.peek_at(1), Some(Tok::LParen)) {
            self.predicate()?
        } else {
            Formula::Var(self.ident()?)
        };
        self.depth -= 1;
        Ok(f)
    }

    fn predicate(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        let name = self.ident()?;
        let arity = match name.as_str() {
            "Goal" | "Means1" | "Means2" | "End" => 1,
            "Causes" => 2,
            "Affects" => 3,
            _ => return Err(ParseError::new(at, format!("unknown predicate {name}"))),
        };
        self.expect(Tok::LParen)?;
        if self.peek() == Some(&Tok::RParen) {
            return Err(ParseError::new(at, format!("{name} takes {arity} argument(s), found 0")));
        }
        let f = match name.as_str() {
            "Goal" => Formula::Goal(self.literal()?),
            "Means1" => Formula::Means(Reading::One, self.patient()?),
            "Means2" => Formula::Means(Reading::Two, self.patient()?),
            "End" => Formula::End(self.patient()?),
            "Causes" => {
                let y = self.literal()?;
                self.arg_separator(at, &name, arity, 1)?;
                let effect_at = self.offset();
                let phi = self.formula()?;
                if phi.has_agency_predicate() {
                    return Err(ParseError::new(
                        effect_at,
                        "the effect of Causes may not contain Causes, Means or End",
                    ));
                }
                Formula::causes(y, phi)
            }
            "Affects" => {
                let lit = self.literal()?;
                self.arg_separator(at, &name, arity, 1)?;
                let patient = self.patient()?;
                self.arg_separator(at, &name, arity, 2)?;
                Formula::Affects(lit, patient, self.sign()?)
            }
            _ => unreachable!(),
        };
        if self.peek() == Some(&Tok::Comma) {
            return Err(ParseError::new(
                at,
                format!("{name} takes {arity} argument(s), found more"),
            ));
        }
        self.expect(Tok::RParen)?;
        Ok(f)
    }

    fn arg_separator(&mut self, at: usize, name: &str, arity: usize, seen: usize) -> Result<(), ParseError> {
        if self.eat(&Tok::Comma) {
            Ok(())
        } else if self.peek() == Some(&Tok::RParen) {
            Err(ParseError::new(at, format!("{name} takes {arity} argument(s), found {seen}")))
        } else {
            Err(self.unexpected("','"))
        }
    }
}

pub fn parse_mechanism(text: &str) -> Result<BoolExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.mech_or()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_query(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses `x` or `!x`.
pub fn parse_literal(text: &str) -> Result<Literal, ParseError> {
    let mut p = Parser::new(text)?;
    let l = p.literal()?;
    p.finish()?;
    Ok(l)
}

// Binding strength used by the renderer: higher binds tighter.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn paren(out: &mut String, wrap: bool, body: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    body(out);
    if wrap {
        out.push(')');
    }
}

fn render_expr(e: &BoolExpr, ctx: u8, out: &mut String) {
    match e {
        BoolExpr::Var(v) => out.push_str(v),
        BoolExpr::Not(inner) => {
            out.push('!');
            render_expr(inner, PREC_UNARY, out);
        }
        BoolExpr::And(l, r) => paren(out, ctx > PREC_AND, |out| {
            render_expr(l, PREC_AND, out);
            out.push_str(" & ");
            render_expr(r, PREC_AND + 1, out);
        }),
        BoolExpr::Or(l, r) => paren(out, ctx > PREC_OR, |out| {
            render_expr(l, PREC_OR, out);
            out.push_str(" | ");
            render_expr(r, PREC_OR + 1, out);
        }),
    }
}

fn render_patient(p: &str, out: &mut String) {
    if is_identifier(p) {
        out.push_str(p);
    } else {
        out.push('"');
        out.push_str(p);
        out.push('"');
    }
}

fn render_formula(f: &Formula, ctx: u8, out: &mut String) {
    match f {
        Formula::Var(v) => out.push_str(v),
        Formula::Not(inner) => {
            out.push('!');
            render_formula(inner, PREC_UNARY, out);
        }
        Formula::And(l, r) => paren(out, ctx > PREC_AND, |out| {
            render_formula(l, PREC_AND, out);
            out.push_str(" & ");
            render_formula(r, PREC_AND + 1, out);
        }),
        Formula::Or(l, r) => paren(out, ctx > PREC_OR, |out| {
            render_formula(l, PREC_OR, out);
            out.push_str(" | ");
            render_formula(r, PREC_OR + 1, out);
        }),
        Formula::Implies(l, r) => paren(out, ctx > PREC_IMPLIES, |out| {
            render_formula(l, PREC_IMPLIES + 1, out);
            out.push_str(" -> ");
            render_formula(r, PREC_IMPLIES, out);
        }),
        Formula::Goal(lit) => {
            out.push_str(&format!("Goal({lit})"));
        }
        Formula::Affects(lit, p, s) => {
            out.push_str(&format!("Affects({lit}, "));
            render_patient(p, out);
            out.push_str(&format!(", {s})"));
        }
        Formula::Causes(lit, phi) => {
            out.push_str(&format!("Causes({lit}, "));
            render_formula(phi, 0, out);
            out.push(')');
        }
        Formula::Means(reading, p) => {
            out.push_str(match reading {
                Reading::One => "Means1(",
                Reading::Two => "Means2(",
            });
            render_patient(p, out);
            out.push(')');
        }
        Formula::End(p) => {
            out.push_str("End(");
            render_patient(p, out);
            out.push(')');
        }
    }
}

/// Canonical ASCII text. Never rewrites the tree.
pub fn render_mechanism(e: &BoolExpr) -> String {
    let mut out = String::new();
    render_expr(e, 0, &mut out);
    out
}

/// Canonical ASCII text. Never rewrites the tree.
pub fn render_formula_text(f: &Formula) -> String {
    let mut out = String::new();
    render_formula(f, 0, &mut out);
    out
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_mechanism(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> BoolExpr {
        BoolExpr::var(s)
    }

    #[test]
    fn mechanism_examples() {
        assert_eq!(
            parse_mechanism("press & !bulbBroken").unwrap(),
            BoolExpr::and(v("press"), BoolExpr::not(v("bulbBroken")))
        );
        assert_eq!(
            parse_mechanism("a | b & c").unwrap(),
            BoolExpr::or(v("a"), BoolExpr::and(v("b"), v("c")))
        );
        assert_eq!(parse_mechanism("((x))").unwrap(), v("x"));
        assert_eq!(parse_mechanism("  a&b  ").unwrap(), BoolExpr::and(v("a"), v("b")));
    }

    #[test]
    fn mechanism_errors_carry_positions() {
        let e = parse_mechanism("a & ").unwrap_err();
        assert_eq!(e.position, 4);
        let e = parse_mechanism("a b").unwrap_err();
        assert_eq!(e.position, 2);
        let e = parse_mechanism("(a").unwrap_err();
        assert_eq!(e.position, 2);
        let e = parse_mechanism("a # b").unwrap_err();
        assert_eq!(e.position, 2);
        // Query syntax is not mechanism syntax.
        assert!(parse_mechanism("a -> b").is_err());
        assert!(parse_mechanism("Goal(a)").is_err());
    }

    #[test]
    fn render_examples() {
        let e = BoolExpr::and(v("press"), BoolExpr::not(v("bulbBroken")));
        assert_eq!(render_mechanism(&e), "press & !bulbBroken");
        let e = BoolExpr::not(BoolExpr::not(v("x")));
        assert_eq!(render_mechanism(&e), "!!x");
        assert_eq!(render_formula_text(&Formula::Means(Reading::One, "Bob".into())), "Means1(Bob)");
    }

    #[test]
    fn render_parenthesises_right_nesting() {
        let e = BoolExpr::and(v("a"), BoolExpr::and(v("b"), v("c")));
        assert_eq!(render_mechanism(&e), "a & (b & c)");
        assert_eq!(parse_mechanism("a & (b & c)").unwrap(), e);
        let e = BoolExpr::not(BoolExpr::or(v("a"), v("b")));
        assert_eq!(render_mechanism(&e), "!(a | b)");
        let f = Formula::implies(Formula::implies(Formula::var("a"), Formula::var("b")), Formula::var("c"));
        assert_eq!(render_formula_text(&f), "(a -> b) -> c");
        assert_eq!(parse_query("(a -> b) -> c").unwrap(), f);
    }

    #[test]
    fn query_examples() {
        assert_eq!(
            parse_query("Means1(Bob) -> End(Bob)").unwrap(),
            Formula::implies(Formula::Means(Reading::One, "Bob".into()), Formula::End("Bob".into()))
        );
        assert_eq!(
            parse_query("Causes(!survive6, survive1 | survive2)").unwrap(),
            Formula::causes(
                Literal::neg("survive6"),
                Formula::or(Formula::var("survive1"), Formula::var("survive2"))
            )
        );
        assert_eq!(
            parse_query("Affects(!drown, \"Alice Smith\", +)").unwrap(),
            Formula::Affects(Literal::neg("drown"), "Alice Smith".into(), Sign::Positive)
        );
        assert_eq!(
            parse_query("a -> b -> c").unwrap(),
            Formula::implies(Formula::var("a"), Formula::implies(Formula::var("b"), Formula::var("c")))
        );
        // A predicate name without parentheses is an ordinary variable.
        assert_eq!(parse_query("Goal").unwrap(), Formula::var("Goal"));
    }

    #[test]
    fn query_arity_errors() {
        let e = parse_query("End()").unwrap_err();
        assert!(e.message.contains("End takes 1 argument"), "{e}");
        let e = parse_query("Means1(Bob, Alice)").unwrap_err();
        assert!(e.message.contains("Means1 takes 1 argument"), "{e}");
        let e = parse_query("Affects(a, Bob)").unwrap_err();
        assert!(e.message.contains("Affects takes 3 argument(s), found 2"), "{e}");
        let e = parse_query("Causes(a)").unwrap_err();
        assert!(e.message.contains("found 1"), "{e}");
        assert!(parse_query("Frob(a)").unwrap_err().message.contains("unknown predicate"));
        assert!(parse_query("Affects(a, Bob, *)").is_err());
    }

    #[test]
    fn causes_effect_must_be_predicate_free() {
        assert!(parse_query("Causes(a, End(Bob))").is_err());
        assert!(parse_query("Causes(a, b & Causes(c, d))").is_err());
        assert!(parse_query("Causes(a, Goal(b) & Affects(b, Bob, -))").is_ok());
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let deep = format!("{}x{}", "(".repeat(100_000), ")".repeat(100_000));
        assert!(parse_mechanism(&deep).is_err());
        assert!(parse_query(&deep).is_err());
        let bangs = format!("{}x", "!".repeat(100_000));
        assert!(parse_query(&bangs).is_err());
        let ok = format!("{}x{}", "(".repeat(100), ")".repeat(100));
        assert_eq!(parse_mechanism(&ok).unwrap(), v("x"));
    }

    #[test]
    fn literals() {
        assert_eq!(parse_literal("!drown").unwrap(), Literal::neg("drown"));
        assert_eq!(parse_literal(" dead ").unwrap(), Literal::pos("dead"));
        assert!(parse_literal("!!x").is_err());
        assert!(parse_literal("a & b").is_err());
        assert!(parse_literal("").is_err());
    }

    #[test]
    fn non_ascii_input_is_rejected_cleanly() {
        let e = parse_mechanism("a ∧ b").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(parse_query("\"unterminated").is_err());
    }
}
