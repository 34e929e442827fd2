//! State-event invariant requirements: "event needs condition", where the
//! condition is a DNF predicate over plant states. Composing a plant with a
//! requirement removes exactly the transitions whose source state falsifies
//! the condition.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automata::{Automaton, EventId, GlobalState};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RequirementError {
    #[error("condition references plant {plant}, absent from the global state")]
    UnresolvableReference { plant: String },
    #[error("condition must have at least one disjunct, each with at least one literal")]
    EmptyCondition,
    #[error("requirement {requirement} restricts event {event}, foreign to the composed plant")]
    ForeignEvent { requirement: String, event: String },
    #[error("state {state} does not decode to a tuple over {expected} plants")]
    UndecodableState { state: String, expected: usize },
    #[error("decoded state {state} is not a state of plant {plant}")]
    ForeignComponentState { state: String, plant: String },
}

/// One literal of a DNF condition: a (possibly negated) plant-state
/// reference, or one of the constants T / F.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub kind: LiteralKind,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiteralKind {
    StateRef { plant: String, state: String },
    TrueLit,
    FalseLit,
}

impl Literal {
    pub fn state_ref(plant: impl Into<String>, state: impl Into<String>) -> Self {
        Literal {
            kind: LiteralKind::StateRef { plant: plant.into(), state: state.into() },
            negated: false,
        }
    }

    pub fn negated_state_ref(plant: impl Into<String>, state: impl Into<String>) -> Self {
        Literal {
            kind: LiteralKind::StateRef { plant: plant.into(), state: state.into() },
            negated: true,
        }
    }

    pub fn true_lit() -> Self {
        Literal { kind: LiteralKind::TrueLit, negated: false }
    }

    pub fn false_lit() -> Self {
        Literal { kind: LiteralKind::FalseLit, negated: false }
    }

    fn eval(&self, gs: &GlobalState) -> Result<bool, RequirementError> {
        let value = match &self.kind {
            LiteralKind::StateRef { plant, state } => {
                let current = gs.get(plant).ok_or_else(|| {
                    RequirementError::UnresolvableReference { plant: plant.clone() }
                })?;
                current == state
            }
            LiteralKind::TrueLit => true,
            LiteralKind::FalseLit => false,
        };
        Ok(value != self.negated)
    }
}

/// A condition in disjunctive normal form: a non-empty list of conjunctions,
/// each a non-empty list of literals. Only DNF is representable; whether the
/// shape additionally meets the structural synthesis-skipping properties is
/// the problem module's business.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    disjuncts: Vec<Vec<Literal>>,
}

impl Condition {
    pub fn new(disjuncts: Vec<Vec<Literal>>) -> Result<Self, RequirementError> {
        if disjuncts.is_empty() || disjuncts.iter().any(|c| c.is_empty()) {
            return Err(RequirementError::EmptyCondition);
        }
        Ok(Condition { disjuncts })
    }

    pub fn single(lit: Literal) -> Self {
        Condition { disjuncts: vec![vec![lit]] }
    }

    pub fn disjuncts(&self) -> &[Vec<Literal>] {
        &self.disjuncts
    }
}

/// "event needs condition": the event is enabled only in composed states
/// whose decoded global state satisfies the condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEventInvariant {
    pub id: String,
    pub event: EventId,
    pub condition: Condition,
}

impl StateEventInvariant {
    pub fn new(id: impl Into<String>, event: EventId, condition: Condition) -> Self {
        StateEventInvariant { id: id.into(), event, condition }
    }

    /// The event this requirement restricts.
    pub fn restricted_event(&self) -> &EventId {
        &self.event
    }

    /// Plant names referenced by the condition; deduplicated, in order of
    /// first appearance (deterministic, so dependency-graph edge order is
    /// stable).
    pub fn condition_plants(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for conj in self.condition.disjuncts() {
            for lit in conj {
                if let LiteralKind::StateRef { plant, .. } = &lit.kind {
                    if seen.insert(plant.clone()) {
                        out.push(plant.clone());
                    }
                }
            }
        }
        out
    }
}

/// Substitute every state reference against the global state and evaluate
/// the DNF. Faults on a reference to a plant absent from `gs`.
pub fn eval_condition(c: &Condition, gs: &GlobalState) -> Result<bool, RequirementError> {
    for conj in c.disjuncts() {
        let mut all = true;
        for lit in conj {
            if !lit.eval(gs)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Decode a composed-product state name back to one state per plant. The
/// naming is the canonical tuple scheme of `compose_all`: `"(s1,...,sn)"`
/// positionally over the plant list, or the bare component state for a
/// single plant.
pub fn decode_product_state(
    name: &str,
    plants: &[Automaton],
) -> Result<GlobalState, RequirementError> {
    let parts: Vec<&str> = if plants.len() == 1 {
        vec![name]
    } else {
        let inner = name
            .strip_prefix('(')
            .and_then(|n| n.strip_suffix(')'))
            .ok_or_else(|| RequirementError::UndecodableState {
                state: name.to_string(),
                expected: plants.len(),
            })?;
        inner.split(',').collect()
    };
    if parts.len() != plants.len() {
        return Err(RequirementError::UndecodableState {
            state: name.to_string(),
            expected: plants.len(),
        });
    }
    for (plant, part) in plants.iter().zip(&parts) {
        if !plant.has_state(part) {
            return Err(RequirementError::ForeignComponentState {
                state: (*part).to_string(),
                plant: plant.name().to_string(),
            });
        }
    }
    Ok(GlobalState::new(
        plants.iter().zip(parts).map(|(p, s)| (p.name().to_string(), s.to_string())),
    ))
}

/// Composition of a composed plant with a set of requirements: the
/// transition (q, e) survives iff every requirement on e is satisfied in q's
/// decoded global state. States and marking are untouched; the result is then
/// restricted to its reachable part.
pub fn compose_plant_with_requirements(
    p: &Automaton,
    rs: &[StateEventInvariant],
    plants: &[Automaton],
) -> Result<Automaton, RequirementError> {
    Ok(apply_requirements_keeping_states(p, rs, plants)?.restrict_to_reachable())
}

/// As [`compose_plant_with_requirements`] but without the final reachability
/// restriction: the state set stays exactly `p`'s. This is the synthesis
/// entry point, which prunes reachability itself.
pub(crate) fn apply_requirements_keeping_states(
    p: &Automaton,
    rs: &[StateEventInvariant],
    plants: &[Automaton],
) -> Result<Automaton, RequirementError> {
    for r in rs {
        if !p.has_event(&r.event.name) {
            return Err(RequirementError::ForeignEvent {
                requirement: r.id.clone(),
                event: r.event.name.clone(),
            });
        }
    }
    let mut removed = BTreeSet::new();
    for (q, state) in p.states().iter().enumerate() {
        let mut decoded: Option<GlobalState> = None;
        for r in rs {
            let e = p.event_index_of(&r.event.name).expect("checked above");
            if p.row(q).contains_key(&e) {
                let gs = match &decoded {
                    Some(gs) => gs,
                    None => {
                        decoded = Some(decode_product_state(state, plants)?);
                        decoded.as_ref().unwrap()
                    }
                };
                if !eval_condition(&r.condition, gs)? {
                    removed.insert((q, e));
                }
            }
        }
    }
    Ok(p.without_transitions(&removed))
}
