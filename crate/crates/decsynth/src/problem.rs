//! Control problems (plants + requirements), their well-formedness rules,
//! sensor/actuator classification, and the two structural property checkers
//! that decide whether synthesis can be skipped outright (full check) or the
//! dependency-graph route applies (relaxed check, which drops the
//! sensors-only-in-conditions property).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::automata::{is_strongly_connected, Automaton};
use crate::requirements::{LiteralKind, StateEventInvariant};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("a control problem needs at least one plant")]
    EmptyPlants,
    #[error("duplicate plant name {name}")]
    DuplicatePlant { name: String },
    #[error("duplicate requirement id {id}")]
    DuplicateRequirement { id: String },
    #[error("event {event} is controllable in plant {first} but uncontrollable in plant {second}")]
    ControllabilityConflict { event: String, first: String, second: String },
    #[error("requirement {requirement}: event {event} is not declared by any plant")]
    UnknownRequirementEvent { requirement: String, event: String },
    #[error("requirement {requirement}: event {event} controllability flag disagrees with its plant declaration")]
    EventFlagMismatch { requirement: String, event: String },
    #[error("requirement {requirement}: condition references unknown plant {plant}")]
    UnknownPlantRef { requirement: String, plant: String },
    #[error("requirement {requirement}: plant {plant} has no state {state}")]
    UnknownStateRef { requirement: String, plant: String, state: String },
}

/// Plants plus state-event invariant requirements, validated on construction:
/// unique plant names and requirement ids, globally consistent controllability
/// flags, requirement events declared by some plant, and every state
/// reference resolvable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlProblem {
    plants: Vec<Automaton>,
    requirements: Vec<StateEventInvariant>,
    plant_idx: HashMap<String, usize>,
}

impl ControlProblem {
    pub fn new(
        plants: Vec<Automaton>,
        requirements: Vec<StateEventInvariant>,
    ) -> Result<Self, ProblemError> {
        if plants.is_empty() {
            return Err(ProblemError::EmptyPlants);
        }
        let mut plant_idx = HashMap::with_capacity(plants.len());
        for (i, p) in plants.iter().enumerate() {
            if plant_idx.insert(p.name().to_string(), i).is_some() {
                return Err(ProblemError::DuplicatePlant { name: p.name().to_string() });
            }
        }
        let mut flags: HashMap<&str, (bool, &str)> = HashMap::new();
        for p in &plants {
            for e in p.alphabet() {
                match flags.get(e.name.as_str()) {
                    None => {
                        flags.insert(&e.name, (e.controllable, p.name()));
                    }
                    Some(&(c, first)) if c != e.controllable => {
                        return Err(ProblemError::ControllabilityConflict {
                            event: e.name.clone(),
                            first: first.to_string(),
                            second: p.name().to_string(),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        let mut ids = BTreeSet::new();
        for r in &requirements {
            if !ids.insert(r.id.clone()) {
                return Err(ProblemError::DuplicateRequirement { id: r.id.clone() });
            }
            match flags.get(r.event.name.as_str()) {
                None => {
                    return Err(ProblemError::UnknownRequirementEvent {
                        requirement: r.id.clone(),
                        event: r.event.name.clone(),
                    });
                }
                Some(&(c, _)) if c != r.event.controllable => {
                    return Err(ProblemError::EventFlagMismatch {
                        requirement: r.id.clone(),
                        event: r.event.name.clone(),
                    });
                }
                Some(_) => {}
            }
            for conj in r.condition.disjuncts() {
                for lit in conj {
                    if let LiteralKind::StateRef { plant, state } = &lit.kind {
                        match plant_idx.get(plant) {
                            None => {
                                return Err(ProblemError::UnknownPlantRef {
                                    requirement: r.id.clone(),
                                    plant: plant.clone(),
                                });
                            }
                            Some(&i) => {
                                if !plants[i].has_state(state) {
                                    return Err(ProblemError::UnknownStateRef {
                                        requirement: r.id.clone(),
                                        plant: plant.clone(),
                                        state: state.clone(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(ControlProblem { plants, requirements, plant_idx })
    }

    pub fn plants(&self) -> &[Automaton] {
        &self.plants
    }

    pub fn requirements(&self) -> &[StateEventInvariant] {
        &self.requirements
    }

    pub fn plant(&self, name: &str) -> Option<&Automaton> {
        self.plant_idx.get(name).map(|&i| &self.plants[i])
    }

    pub fn plant_index(&self, name: &str) -> Option<usize> {
        self.plant_idx.get(name).copied()
    }

    /// Indices of every plant declaring `event` (more than one only in
    /// non-product systems).
    pub fn event_owners(&self, event: &str) -> Vec<usize> {
        self.plants
            .iter()
            .enumerate()
            .filter(|(_, p)| p.has_event(event))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlantClass {
    Sensor,
    Actuator,
    Mixed,
}

impl std::fmt::Display for PlantClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlantClass::Sensor => write!(f, "sensor"),
            PlantClass::Actuator => write!(f, "actuator"),
            PlantClass::Mixed => write!(f, "mixed"),
        }
    }
}

/// Sensor iff the alphabet has only uncontrollable events, actuator iff only
/// controllable ones, mixed otherwise (e.g. a timer with a controllable start
/// and an uncontrollable timeout).
pub fn classify_plant(p: &Automaton) -> PlantClass {
    let controllable = p.alphabet().iter().filter(|e| e.controllable).count();
    if controllable == 0 {
        PlantClass::Sensor
    } else if controllable == p.alphabet().len() {
        PlantClass::Actuator
    } else {
        PlantClass::Mixed
    }
}

/// Pairwise disjoint plant alphabets.
pub fn is_product_system(cp: &ControlProblem) -> bool {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for p in cp.plants() {
        for e in p.alphabet() {
            if !seen.insert(&e.name) {
                return false;
            }
        }
    }
    true
}

/// The structural properties a checker can find violated.
///
/// P1: the plants form a product system. P2: every plant is strongly
/// connected with at least one marked state. P3a..P3g: per-requirement shape
/// properties (state-event invariant form, controllable event, unique event,
/// DNF over plant-state atoms, at most one reference per plant per
/// conjunction, no negation on single-state plants, sensors-only references).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PropertyTag {
    P1,
    P2,
    P3a,
    P3b,
    P3c,
    P3d,
    P3e,
    P3f,
    P3g,
}

impl std::fmt::Display for PropertyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PropertyTag::P1 => "P1",
            PropertyTag::P2 => "P2",
            PropertyTag::P3a => "P3a",
            PropertyTag::P3b => "P3b",
            PropertyTag::P3c => "P3c",
            PropertyTag::P3d => "P3d",
            PropertyTag::P3e => "P3e",
            PropertyTag::P3f => "P3f",
            PropertyTag::P3g => "P3g",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyViolation {
    pub tag: PropertyTag,
    /// Plant name (P1, P2) or requirement id (P3x).
    pub subject: String,
    pub message: String,
}

/// Checker outcome: at most one violation per (property, subject) pair, in
/// stable order (plant order for P1/P2, then requirement order with P3b..P3g
/// per requirement). `notes` carries informational observations that do not
/// affect `satisfied`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub satisfied: bool,
    pub violations: Vec<PropertyViolation>,
    pub notes: Vec<String>,
}

impl PropertyReport {
    fn from_parts(violations: Vec<PropertyViolation>, notes: Vec<String>) -> Self {
        PropertyReport { satisfied: violations.is_empty(), violations, notes }
    }

    pub fn has_violation(&self, tag: PropertyTag) -> bool {
        self.violations.iter().any(|v| v.tag == tag)
    }
}

/// Full structural check, including the sensors-only-in-conditions property
/// (P3g). Satisfied means the plant composed with the requirements is already
/// a controllable, nonblocking, maximally permissive supervisor and synthesis
/// is unnecessary. Purely structural: no state-space product is built.
pub fn check_cnms(cp: &ControlProblem) -> PropertyReport {
    check_properties(cp, true)
}

/// Relaxed structural check: all properties except P3g. Satisfied problems
/// qualify for the dependency-graph route (skip on acyclic self-loop-free
/// graphs, sectionalize otherwise).
pub fn check_rcnms(cp: &ControlProblem) -> PropertyReport {
    check_properties(cp, false)
}

fn check_properties(cp: &ControlProblem, include_sensor_property: bool) -> PropertyReport {
    let mut violations = Vec::new();
    let mut notes = Vec::new();

    // P1, keyed by the later plant of each overlapping pair.
    let mut seen_events: BTreeMap<&str, &str> = BTreeMap::new();
    for p in cp.plants() {
        let mut overlaps: Vec<String> = Vec::new();
        for e in p.alphabet() {
            if let Some(first) = seen_events.get(e.name.as_str()) {
                overlaps.push(format!("event {} also declared by plant {}", e.name, first));
            }
        }
        for e in p.alphabet() {
            seen_events.entry(&e.name).or_insert_with(|| p.name());
        }
        if !overlaps.is_empty() {
            violations.push(PropertyViolation {
                tag: PropertyTag::P1,
                subject: p.name().to_string(),
                message: format!("not a product system: {}", overlaps.join("; ")),
            });
        }
    }

    // P2 per plant.
    for p in cp.plants() {
        let mut reasons = Vec::new();
        if !is_strongly_connected(p) {
            reasons.push("not strongly connected");
        }
        if p.marked_states().next().is_none() {
            reasons.push("no marked state");
        }
        if !reasons.is_empty() {
            violations.push(PropertyViolation {
                tag: PropertyTag::P2,
                subject: p.name().to_string(),
                message: reasons.join("; "),
            });
        }
    }

    // P3b..P3g per requirement, in requirement order.
    let mut event_users: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in cp.requirements() {
        event_users.entry(&r.event.name).or_default().push(&r.id);
    }
    for r in cp.requirements() {
        if !r.event.controllable {
            violations.push(PropertyViolation {
                tag: PropertyTag::P3b,
                subject: r.id.clone(),
                message: format!("restricted event {} is uncontrollable", r.event.name),
            });
        }
        let users = &event_users[r.event.name.as_str()];
        if users.len() > 1 {
            let others: Vec<&str> =
                users.iter().copied().filter(|id| *id != r.id.as_str()).collect();
            violations.push(PropertyViolation {
                tag: PropertyTag::P3c,
                subject: r.id.clone(),
                message: format!(
                    "event {} is also restricted by {}",
                    r.event.name,
                    others.join(", ")
                ),
            });
        }

        let mut constant_literals = 0usize;
        let mut duplicate_refs: Vec<String> = Vec::new();
        let mut negated_single: Vec<String> = Vec::new();
        let mut non_sensor_refs: Vec<String> = Vec::new();
        let mut single_positive: Vec<String> = Vec::new();
        for (d, conj) in r.condition.disjuncts().iter().enumerate() {
            let mut per_plant: BTreeMap<&str, usize> = BTreeMap::new();
            for lit in conj {
                match &lit.kind {
                    LiteralKind::TrueLit | LiteralKind::FalseLit => constant_literals += 1,
                    LiteralKind::StateRef { plant, .. } => {
                        *per_plant.entry(plant.as_str()).or_insert(0) += 1;
                        let p = cp.plant(plant).expect("validated at construction");
                        if lit.negated && p.num_states() == 1 {
                            negated_single.push(plant.clone());
                        }
                        if !lit.negated && p.num_states() == 1 {
                            single_positive.push(plant.clone());
                        }
                        if include_sensor_property && classify_plant(p) != PlantClass::Sensor {
                            non_sensor_refs.push(format!("{} ({})", plant, classify_plant(p)));
                        }
                    }
                }
            }
            for (plant, count) in per_plant {
                if count > 1 {
                    duplicate_refs
                        .push(format!("plant {plant} referenced {count} times in disjunct {d}"));
                }
            }
        }
        if constant_literals > 0 {
            violations.push(PropertyViolation {
                tag: PropertyTag::P3d,
                subject: r.id.clone(),
                message: format!(
                    "condition contains {constant_literals} constant literal(s); every atom must be a plant-state reference"
                ),
            });
        }
        if !duplicate_refs.is_empty() {
            violations.push(PropertyViolation {
                tag: PropertyTag::P3e,
                subject: r.id.clone(),
                message: duplicate_refs.join("; "),
            });
        }
        if !negated_single.is_empty() {
            negated_single.sort();
            negated_single.dedup();
            violations.push(PropertyViolation {
                tag: PropertyTag::P3f,
                subject: r.id.clone(),
                message: format!(
                    "negated reference to single-state plant(s) {}",
                    negated_single.join(", ")
                ),
            });
        }
        if !non_sensor_refs.is_empty() {
            non_sensor_refs.sort();
            non_sensor_refs.dedup();
            violations.push(PropertyViolation {
                tag: PropertyTag::P3g,
                subject: r.id.clone(),
                message: format!("condition references non-sensor plant(s) {}", non_sensor_refs.join(", ")),
            });
        }
        if !single_positive.is_empty() {
            single_positive.sort();
            single_positive.dedup();
            notes.push(format!(
                "requirement {}: positive reference to single-state plant(s) {} is always true",
                r.id,
                single_positive.join(", ")
            ));
        }
    }

    PropertyReport::from_parts(violations, notes)
}
