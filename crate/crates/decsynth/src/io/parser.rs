//! Recursive-descent parser and validator for the control-problem DSL.
//!
//! Recovery strategy: a malformed construct produces one error diagnostic
//! and the parser skips ahead to the next top-level keyword (or past the
//! current plant's closing brace), so one mistake does not drown the rest of
//! the file. After the syntax pass, a validation pass checks every
//! cross-reference with spans, and the problem is constructed only when no
//! error was found.
//!
//! Stable diagnostic codes:
//! - `E-PARSE` syntax errors and reserved-word misuse
//! - `E-NO-PLANTS` model without any plant
//! - `E-DUP-PLANT`, `E-DUP-STATE`, `E-DUP-TRANS`, `E-DUP-REQ` duplicates
//! - `E-NO-EVENTS` plant without events
//! - `E-EVENT-OWNER` event name declared twice (same or different plant)
//! - `E-UNKNOWN-STATE`, `E-UNKNOWN-EVENT`, `E-UNKNOWN-PLANT` dangling references
//! - `E-REQ-AUT` requirement written as an automaton block instead of a
//!   state-event invariant
//! - `E-REQ-EVENT` requirement restricting an undeclared event
//! - `I-MARKED-DEFAULT` info: omitted `marked` defaults to the initial state

use std::collections::HashMap;

use super::lexer::{is_reserved, lex, Token, TokenKind};
use super::{Diagnostic, ParseOutcome, Severity, Span};
use crate::automata::{Automaton, EventId};
use crate::problem::ControlProblem;
use crate::requirements::{Condition, Literal, StateEventInvariant};

#[derive(Debug, Clone)]
struct Name {
    text: String,
    span: Span,
}

#[derive(Debug)]
struct TransAst {
    from: Name,
    event: Name,
    to: Name,
}

#[derive(Debug)]
struct PlantAst {
    name: Name,
    states: Vec<Name>,
    marked: Option<Vec<Name>>,
    initial: Name,
    controllable: Vec<Name>,
    uncontrollable: Vec<Name>,
    trans: Vec<TransAst>,
}

#[derive(Debug)]
enum LitAst {
    Ref { negated: bool, plant: Name, state: Name },
    Const { negated: bool, value: bool },
}

#[derive(Debug)]
struct ReqAst {
    id: Name,
    event: Name,
    condition: Vec<Vec<LitAst>>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if !self.at_eof() {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, span: Span, code: &str, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::new(Severity::Error, span, code, message));
    }

    fn info(&mut self, span: Span, code: &str, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::new(Severity::Info, span, code, message));
    }

    /// Consumes a non-reserved identifier, described as `what` in errors.
    fn expect_name(&mut self, what: &str) -> Option<Name> {
        let t = self.peek().clone();
        if t.kind != TokenKind::Ident {
            self.error(
                t.span,
                "E-PARSE",
                format!("expected {what}, found {}", describe(&t)),
            );
            return None;
        }
        if is_reserved(&t.text) {
            self.error(
                t.span,
                "E-PARSE",
                format!("expected {what}, found reserved word '{}'", t.text),
            );
            return None;
        }
        self.bump();
        Some(Name { text: t.text, span: t.span })
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> Option<Token> {
        let t = self.peek().clone();
        if t.kind != kind {
            self.error(
                t.span,
                "E-PARSE",
                format!("expected {what}, found {}", describe(&t)),
            );
            return None;
        }
        Some(self.bump())
    }

    fn expect_kw(&mut self, kw: &str) -> Option<Token> {
        let t = self.peek().clone();
        if !t.is_kw(kw) {
            self.error(t.span, "E-PARSE", format!("expected '{kw}', found {}", describe(&t)));
            return None;
        }
        Some(self.bump())
    }

    /// One or more non-reserved identifiers (a name list).
    fn name_list(&mut self, what: &str) -> Vec<Name> {
        let mut names = Vec::new();
        while self.peek().kind == TokenKind::Ident && !is_reserved(&self.peek().text) {
            let t = self.bump();
            names.push(Name { text: t.text, span: t.span });
        }
        if names.is_empty() {
            let t = self.peek().clone();
            self.error(
                t.span,
                "E-PARSE",
                format!("expected at least one {what}, found {}", describe(&t)),
            );
        }
        names
    }

    /// Skips to the next top-level keyword (or EOF).
    fn sync_top_level(&mut self) {
        while !self.at_eof() {
            let t = self.peek();
            if t.is_kw("plant") || t.is_kw("requirement") {
                return;
            }
            self.bump();
        }
    }

    /// Skips a brace-balanced block; assumes the opening brace has not been
    /// consumed yet. Used to step over automaton-style requirement bodies
    /// and unusable plant bodies.
    fn skip_braced_block(&mut self) {
        if self.expect_kind(TokenKind::LBrace, "'{'").is_none() {
            self.sync_top_level();
            return;
        }
        let mut depth = 1usize;
        while !self.at_eof() && depth > 0 {
            match self.bump().kind {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => depth -= 1,
                _ => {}
            }
        }
    }

    fn parse_plant(&mut self) -> Option<PlantAst> {
        self.expect_kw("plant")?;
        let name = match self.expect_name("a plant name") {
            Some(n) => n,
            None => {
                self.sync_top_level();
                return None;
            }
        };
        if self.expect_kind(TokenKind::LBrace, "'{'").is_none() {
            self.sync_top_level();
            return None;
        }

        let body = self.parse_plant_body(&name);
        if body.is_none() {
            // Abandon the rest of the block but keep parsing the file.
            let mut depth = 1usize;
            while !self.at_eof() && depth > 0 {
                match self.bump().kind {
                    TokenKind::LBrace => depth += 1,
                    TokenKind::RBrace => depth -= 1,
                    _ => {}
                }
            }
            return None;
        }
        let (states, marked, initial, controllable, uncontrollable, trans) = body?;
        if self.expect_kind(TokenKind::RBrace, "'}'").is_none() {
            self.sync_top_level();
            return None;
        }
        Some(PlantAst { name, states, marked, initial, controllable, uncontrollable, trans })
    }

    #[allow(clippy::type_complexity)]
    fn parse_plant_body(
        &mut self,
        plant: &Name,
    ) -> Option<(Vec<Name>, Option<Vec<Name>>, Name, Vec<Name>, Vec<Name>, Vec<TransAst>)> {
        self.expect_kw("states")?;
        let states = self.name_list("state name");
        if states.is_empty() {
            return None;
        }
        let marked = if self.peek().is_kw("marked") {
            self.bump();
            let m = self.name_list("marked state name");
            if m.is_empty() {
                return None;
            }
            Some(m)
        } else {
            None
        };
        self.expect_kw("initial")?;
        let initial = self.expect_name("the initial state name")?;
        if marked.is_none() {
            self.info(
                initial.span,
                "I-MARKED-DEFAULT",
                format!(
                    "plant {}: no marked states listed; the initial state {} is assumed marked",
                    plant.text, initial.text
                ),
            );
        }
        let mut controllable = Vec::new();
        if self.peek().is_kw("controllable") {
            self.bump();
            controllable = self.name_list("controllable event name");
            if controllable.is_empty() {
                return None;
            }
        }
        let mut uncontrollable = Vec::new();
        if self.peek().is_kw("uncontrollable") {
            self.bump();
            uncontrollable = self.name_list("uncontrollable event name");
            if uncontrollable.is_empty() {
                return None;
            }
        }
        let mut trans = Vec::new();
        while self.peek().is_kw("trans") {
            self.bump();
            let from = self.expect_name("a source state")?;
            self.expect_kind(TokenKind::Dash, "'-'")?;
            let event = self.expect_name("an event name")?;
            self.expect_kind(TokenKind::Arrow, "'->'")?;
            let to = self.expect_name("a target state")?;
            trans.push(TransAst { from, event, to });
        }
        Some((states, marked, initial, controllable, uncontrollable, trans))
    }

    fn parse_requirement(&mut self) -> Option<ReqAst> {
        self.expect_kw("requirement")?;
        let id = match self.expect_name("a requirement name") {
            Some(n) => n,
            None => {
                self.sync_top_level();
                return None;
            }
        };
        if self.peek().kind == TokenKind::LBrace {
            let span = self.peek().span;
            self.error(
                span,
                "E-REQ-AUT",
                format!(
                    "requirement {} is written as an automaton block; requirements must be \
                     state-event invariant expressions ('requirement {}: EVENT needs CONDITION')",
                    id.text, id.text
                ),
            );
            self.skip_braced_block();
            return None;
        }
        let ok = (|| {
            self.expect_kind(TokenKind::Colon, "':'")?;
            let event = self.expect_name("an event name")?;
            self.expect_kw("needs")?;
            let condition = self.parse_dnf()?;
            Some(ReqAst { id: id.clone(), event, condition })
        })();
        if ok.is_none() {
            self.sync_top_level();
        }
        ok
    }

    fn parse_dnf(&mut self) -> Option<Vec<Vec<LitAst>>> {
        let mut disjuncts = vec![self.parse_conj()?];
        while self.peek().is_kw("or") {
            self.bump();
            disjuncts.push(self.parse_conj()?);
        }
        Some(disjuncts)
    }

    fn parse_conj(&mut self) -> Option<Vec<LitAst>> {
        let mut lits = vec![self.parse_lit()?];
        while self.peek().is_kw("and") {
            self.bump();
            lits.push(self.parse_lit()?);
        }
        Some(lits)
    }

    fn parse_lit(&mut self) -> Option<LitAst> {
        let negated = if self.peek().is_kw("not") {
            self.bump();
            true
        } else {
            false
        };
        let t = self.peek().clone();
        if t.kind != TokenKind::Ident || is_reserved(&t.text) {
            self.error(
                t.span,
                "E-PARSE",
                format!("expected a condition literal (PLANT.STATE, T, or F), found {}", describe(&t)),
            );
            return None;
        }
        // `T` / `F` are constants unless qualified into a plant reference.
        let qualifies = self.tokens.get(self.pos + 1).map(|n| n.kind) == Some(TokenKind::Dot);
        if !qualifies && (t.text == "T" || t.text == "F") {
            self.bump();
            return Some(LitAst::Const { negated, value: t.text == "T" });
        }
        let plant = self.expect_name("a plant name")?;
        self.expect_kind(TokenKind::Dot, "'.'")?;
        let state = self.expect_name("a state name")?;
        Some(LitAst::Ref { negated, plant, state })
    }
}

fn describe(t: &Token) -> String {
    match t.kind {
        TokenKind::Eof => "end of input".to_string(),
        TokenKind::Ident => format!("'{}'", t.text),
        _ => format!("'{}'", t.text),
    }
}

/// Parses and validates DSL text into a control problem. Total on arbitrary
/// input: the outcome carries a problem exactly when no error-severity
/// diagnostic was produced.
pub fn parse_model(src: &str) -> ParseOutcome {
    let (tokens, mut diagnostics) = lex(src);
    let mut parser = Parser { tokens, pos: 0, diagnostics: Vec::new() };

    let mut plants = Vec::new();
    let mut requirements = Vec::new();
    while !parser.at_eof() {
        let t = parser.peek().clone();
        if t.is_kw("plant") {
            if let Some(p) = parser.parse_plant() {
                plants.push(p);
            }
        } else if t.is_kw("requirement") {
            if let Some(r) = parser.parse_requirement() {
                requirements.push(r);
            }
        } else {
            parser.error(
                t.span,
                "E-PARSE",
                format!("expected 'plant' or 'requirement', found {}", describe(&t)),
            );
            parser.bump();
            parser.sync_top_level();
        }
    }

    diagnostics.append(&mut parser.diagnostics);
    let problem = build(src, &plants, &requirements, &mut diagnostics);
    ParseOutcome { problem, diagnostics }
}

/// Cross-reference validation over the parsed syntax, then construction.
fn build(
    src: &str,
    plants: &[PlantAst],
    requirements: &[ReqAst],
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<ControlProblem> {
    let mut error = |span: Span, code: &str, message: String| {
        diagnostics.push(Diagnostic::new(Severity::Error, span, code, message));
    };

    if plants.is_empty() {
        let span = Span::new(0, src.len(), 1, 1);
        error(span, "E-NO-PLANTS", "the model declares no plants".to_string());
    }

    // Plant-level tables. First declaration wins on duplicates.
    let mut plant_index: HashMap<&str, usize> = HashMap::new();
    let mut states_of: Vec<HashMap<&str, ()>> = Vec::new();
    // Event name -> (declaring plant index, controllable).
    let mut event_owner: HashMap<&str, (usize, bool)> = HashMap::new();

    for (pi, p) in plants.iter().enumerate() {
        if let Some(&first) = plant_index.get(p.name.text.as_str()) {
            error(
                p.name.span,
                "E-DUP-PLANT",
                format!(
                    "plant {} is already declared (as plant #{})",
                    p.name.text,
                    first + 1
                ),
            );
        } else {
            plant_index.insert(&p.name.text, pi);
        }

        let mut states: HashMap<&str, ()> = HashMap::new();
        for s in &p.states {
            if states.insert(&s.text, ()).is_some() {
                error(
                    s.span,
                    "E-DUP-STATE",
                    format!("state {} is declared twice in plant {}", s.text, p.name.text),
                );
            }
        }
        for m in p.marked.iter().flatten() {
            if !states.contains_key(m.text.as_str()) {
                error(
                    m.span,
                    "E-UNKNOWN-STATE",
                    format!("marked state {} is not a state of plant {}", m.text, p.name.text),
                );
            }
        }
        if !states.contains_key(p.initial.text.as_str()) {
            error(
                p.initial.span,
                "E-UNKNOWN-STATE",
                format!(
                    "initial state {} is not a state of plant {}",
                    p.initial.text, p.name.text
                ),
            );
        }

        if p.controllable.is_empty() && p.uncontrollable.is_empty() {
            error(
                p.name.span,
                "E-NO-EVENTS",
                format!("plant {} declares no events", p.name.text),
            );
        }
        for (list, flag) in [(&p.controllable, true), (&p.uncontrollable, false)] {
            for e in list {
                if let Some(&(owner, _)) = event_owner.get(e.text.as_str()) {
                    let owner_name = &plants[owner].name.text;
                    let place = if owner == pi {
                        "this plant".to_string()
                    } else {
                        format!("plant {owner_name}")
                    };
                    error(
                        e.span,
                        "E-EVENT-OWNER",
                        format!(
                            "event {} is already declared by {place}; every event belongs to \
                             exactly one plant",
                            e.text
                        ),
                    );
                } else {
                    event_owner.insert(&e.text, (pi, flag));
                }
            }
        }

        let mut seen_edges: HashMap<(&str, &str), ()> = HashMap::new();
        for tr in &p.trans {
            for endpoint in [&tr.from, &tr.to] {
                if !states.contains_key(endpoint.text.as_str()) {
                    error(
                        endpoint.span,
                        "E-UNKNOWN-STATE",
                        format!(
                            "state {} is not declared in plant {}",
                            endpoint.text, p.name.text
                        ),
                    );
                }
            }
            match event_owner.get(tr.event.text.as_str()) {
                Some(&(owner, _)) if owner == pi => {}
                _ => {
                    error(
                        tr.event.span,
                        "E-UNKNOWN-EVENT",
                        format!(
                            "event {} is not declared by plant {}",
                            tr.event.text, p.name.text
                        ),
                    );
                }
            }
            if seen_edges.insert((&tr.from.text, &tr.event.text), ()).is_some() {
                error(
                    tr.event.span,
                    "E-DUP-TRANS",
                    format!(
                        "plant {} already has a transition from {} on {}; models are \
                         deterministic",
                        p.name.text, tr.from.text, tr.event.text
                    ),
                );
            }
        }
        states_of.push(states);
    }

    // Requirement validation.
    let mut req_ids: HashMap<&str, ()> = HashMap::new();
    for r in requirements {
        if req_ids.insert(&r.id.text, ()).is_some() {
            error(
                r.id.span,
                "E-DUP-REQ",
                format!("requirement {} is already declared", r.id.text),
            );
        }
        if !event_owner.contains_key(r.event.text.as_str()) {
            error(
                r.event.span,
                "E-REQ-EVENT",
                format!(
                    "requirement {}: event {} is not declared by any plant",
                    r.id.text, r.event.text
                ),
            );
        }
        for lit in r.condition.iter().flatten() {
            let LitAst::Ref { plant, state, .. } = lit else { continue };
            match plant_index.get(plant.text.as_str()) {
                None => {
                    error(
                        plant.span,
                        "E-UNKNOWN-PLANT",
                        format!(
                            "requirement {}: no plant named {} exists",
                            r.id.text, plant.text
                        ),
                    );
                }
                Some(&pi) => {
                    if !states_of[pi].contains_key(state.text.as_str()) {
                        error(
                            state.span,
                            "E-UNKNOWN-STATE",
                            format!(
                                "requirement {}: plant {} has no state {}",
                                r.id.text, plant.text, state.text
                            ),
                        );
                    }
                }
            }
        }
    }

    if diagnostics.iter().any(Diagnostic::is_error) {
        return None;
    }

    // Construction: validation guarantees these succeed.
    let automatons: Vec<Automaton> = plants
        .iter()
        .map(|p| {
            let states: Vec<String> = p.states.iter().map(|s| s.text.clone()).collect();
            let alphabet: Vec<EventId> = p
                .controllable
                .iter()
                .map(|e| EventId::controllable(&e.text))
                .chain(p.uncontrollable.iter().map(|e| EventId::uncontrollable(&e.text)))
                .collect();
            let transitions: Vec<(String, String, String)> = p
                .trans
                .iter()
                .map(|t| (t.from.text.clone(), t.event.text.clone(), t.to.text.clone()))
                .collect();
            let marked: Vec<String> = match &p.marked {
                Some(m) => m.iter().map(|s| s.text.clone()).collect(),
                None => vec![p.initial.text.clone()],
            };
            Automaton::new(&p.name.text, states, alphabet, transitions, &p.initial.text, marked)
                .expect("validated plant")
        })
        .collect();

    let invariants: Vec<StateEventInvariant> = requirements
        .iter()
        .map(|r| {
            let &(_, controllable) =
                event_owner.get(r.event.text.as_str()).expect("validated event");
            let event = EventId { name: r.event.text.clone(), controllable };
            let disjuncts: Vec<Vec<Literal>> = r
                .condition
                .iter()
                .map(|conj| conj.iter().map(lower_literal).collect())
                .collect();
            let condition = Condition::new(disjuncts).expect("parser produces non-empty DNF");
            StateEventInvariant::new(&r.id.text, event, condition)
        })
        .collect();

    match ControlProblem::new(automatons, invariants) {
        Ok(cp) => Some(cp),
        Err(e) => {
            // Unreachable when validation above is complete; keep totality.
            diagnostics.push(Diagnostic::new(
                Severity::Error,
                Span::new(0, src.len(), 1, 1),
                "E-MODEL",
                e.to_string(),
            ));
            None
        }
    }
}

fn lower_literal(lit: &LitAst) -> Literal {
    match lit {
        LitAst::Ref { negated: false, plant, state } => Literal::state_ref(&plant.text, &state.text),
        LitAst::Ref { negated: true, plant, state } => {
            Literal::negated_state_ref(&plant.text, &state.text)
        }
        LitAst::Const { negated, value } => {
            if *value != *negated {
                Literal::true_lit()
            } else {
                Literal::false_lit()
            }
        }
    }
}
