//! Ground-truth machinery: brute-force verification of closed loops with
//! replayable counterexample witnesses, an exhaustive-search oracle for
//! maximal permissiveness, and seeded random-instance generators for the
//! structural classes the reduction method relies on.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::automata::{compose_all_bounded, is_nonblocking, Automaton, AutomatonError, EventId};
use crate::problem::ControlProblem;
use crate::requirements::{
    apply_requirements_keeping_states, Condition, Literal, RequirementError, StateEventInvariant,
};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("exploration exceeds the bound of {bound} states")]
    SizeBound { bound: usize },
    #[error("problem has {transitions} controllable transitions; exhaustive search is limited to {limit}")]
    TooLargeForEnumeration { transitions: usize, limit: usize },
    #[error("supervisor {supervisor} uses event {event} that no plant declares")]
    ForeignSupervisorEvent { supervisor: String, event: String },
    #[error(transparent)]
    Model(#[from] AutomatonError),
    #[error(transparent)]
    Requirement(#[from] RequirementError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Upper limit on explored product states.
    pub bound: usize,
    /// Also compare against the exhaustive-search supremum (small instances
    /// only); checked only when the other three properties hold.
    pub check_maximality: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { bound: 1_000_000, check_maximality: false }
    }
}

/// Counterexample for one failed property: a transition path starting at the
/// initial state, replayable step by step. For safety the last step is the
/// offending transition; for nonblocking the path ends in a state that cannot
/// reach a marked state; for controllability the message names the
/// uncontrollable event the closed loop wrongly disables at the path's end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub property: String,
    pub path: Vec<(String, String, String)>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationVerdict {
    pub safe: bool,
    pub controllable: bool,
    pub nonblocking: bool,
    /// `None` when not checked (large instance, or another property already
    /// failed).
    pub maximally_permissive: Option<bool>,
    pub witnesses: Vec<Witness>,
}

impl VerificationVerdict {
    /// True iff every checked property holds.
    pub fn all_hold(&self) -> bool {
        self.safe
            && self.controllable
            && self.nonblocking
            && self.maximally_permissive != Some(false)
    }
}

/// Replays a witness path through an automaton: the path must start at the
/// initial state and follow defined transitions.
pub fn replay_witness(aut: &Automaton, path: &[(String, String, String)]) -> bool {
    let mut cur = aut.initial().to_string();
    for (source, event, target) in path {
        if *source != cur {
            return false;
        }
        match aut.step(source, event) {
            Ok(Some(t)) if t == target => cur = target.clone(),
            _ => return false,
        }
    }
    true
}

/// Whether `word` is in the automaton's language: every event defined along
/// the run (and the final state marked, when `require_marked`). Events
/// foreign to the alphabet put the word outside the language.
pub fn word_in_language(aut: &Automaton, word: &[&str], require_marked: bool) -> bool {
    let mut cur = aut.initial().to_string();
    for e in word {
        if !aut.has_event(e) {
            return false;
        }
        match aut.step(&cur, e).expect("state and event checked") {
            Some(t) => cur = t.to_string(),
            None => return false,
        }
    }
    !require_marked || aut.is_marked(&cur).expect("state exists")
}

/// Projects a word onto an automaton's alphabet (the events it can see).
pub fn project_word<'a>(word: &[&'a str], aut: &Automaton) -> Vec<&'a str> {
    word.iter().copied().filter(|e| aut.has_event(e)).collect()
}

/// The requirements-restricted closed loop P∥R (reachable part): the
/// behavior every supervisor is verified against.
pub fn closed_loop(cp: &ControlProblem, bound: usize) -> Result<Automaton, OracleError> {
    let plant = compose_all_bounded(cp.plants(), bound).map_err(|e| match e {
        AutomatonError::SizeBound { bound } => OracleError::SizeBound { bound },
        other => OracleError::Model(other),
    })?;
    let pr = apply_requirements_keeping_states(&plant, cp.requirements(), cp.plants())?;
    Ok(pr.restrict_to_reachable())
}

fn shortest_path_to(
    aut: &Automaton,
    want: impl Fn(usize) -> bool,
) -> Option<Vec<(String, String, String)>> {
    let n = aut.num_states();
    let init = aut.initial_index();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[init] = true;
    let mut queue = VecDeque::from([init]);
    let mut found = if want(init) { Some(init) } else { None };
    while found.is_none() {
        let Some(q) = queue.pop_front() else { break };
        for (&e, &t) in aut.row(q).iter() {
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((q, e));
                if want(t) {
                    found = Some(t);
                    break;
                }
                queue.push_back(t);
            }
        }
    }
    let mut cur = found?;
    let mut path = Vec::new();
    while let Some((p, e)) = parent[cur] {
        path.push((
            aut.state_name(p).to_string(),
            aut.alphabet()[e].name.clone(),
            aut.state_name(cur).to_string(),
        ));
        cur = p;
    }
    path.reverse();
    Some(path)
}

/// Reconstructs the path to `target` from BFS back-pointers over an
/// automaton's own transitions.
fn backtrack(
    aut: &Automaton,
    parent: &HashMap<usize, (usize, usize)>,
    target: usize,
) -> Vec<(String, String, String)> {
    let mut path = Vec::new();
    let mut cur = target;
    while let Some(&(p, e)) = parent.get(&cur) {
        path.push((
            aut.state_name(p).to_string(),
            aut.alphabet()[e].name.clone(),
            aut.state_name(cur).to_string(),
        ));
        cur = p;
    }
    path.reverse();
    path
}

/// Checks a proposed modular solution against a control problem. The closed
/// loop is the requirements-restricted plant composed with every supervisor
/// (an empty list checks P∥R itself). Safety is simulation against P∥R,
/// controllability is checked against the uncontrolled plant, nonblocking is
/// coreachability; each failed property carries a replayable witness.
/// Maximal permissiveness is compared against the exhaustive-search supremum
/// when requested and the instance is small enough.
pub fn verify_closed_loop(
    cp: &ControlProblem,
    supervisors: &[Automaton],
    opts: &VerifyOptions,
) -> Result<VerificationVerdict, OracleError> {
    let plant = compose_all_bounded(cp.plants(), opts.bound).map_err(|e| match e {
        AutomatonError::SizeBound { bound } => OracleError::SizeBound { bound },
        other => OracleError::Model(other),
    })?;
    for s in supervisors {
        for e in s.alphabet() {
            if plant.event(&e.name).is_none() {
                return Err(OracleError::ForeignSupervisorEvent {
                    supervisor: s.name().to_string(),
                    event: e.name.clone(),
                });
            }
        }
    }
    let pr = apply_requirements_keeping_states(&plant, cp.requirements(), cp.plants())?
        .restrict_to_reachable();
    let closed = if supervisors.is_empty() {
        pr.clone()
    } else {
        let mut parts = Vec::with_capacity(supervisors.len() + 1);
        parts.push(pr.clone());
        parts.extend(supervisors.iter().cloned());
        compose_all_bounded(&parts, opts.bound).map_err(|e| match e {
            AutomatonError::SizeBound { bound } => OracleError::SizeBound { bound },
            other => OracleError::Model(other),
        })?
    };

    let mut witnesses = Vec::new();

    // Safety: every closed-loop transition must be available in P∥R.
    let mut safe = true;
    {
        let event_in_pr: Vec<Option<usize>> = closed
            .alphabet()
            .iter()
            .map(|e| pr.event_index_of(&e.name))
            .collect();
        let start = (closed.initial_index(), pr.initial_index());
        let mut seen: HashSet<(usize, usize)> = HashSet::from([start]);
        let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        'safety: while let Some((c, p)) = queue.pop_front() {
            for (&e, &ct) in closed.row(c).iter() {
                let pt = event_in_pr[e].and_then(|pe| pr.row(p).get(&pe).copied());
                match pt {
                    Some(pt) => {
                        if seen.insert((ct, pt)) {
                            parent.entry(ct).or_insert((c, e));
                            queue.push_back((ct, pt));
                        }
                    }
                    None => {
                        safe = false;
                        let mut path = backtrack(&closed, &parent, c);
                        path.push((
                            closed.state_name(c).to_string(),
                            closed.alphabet()[e].name.clone(),
                            closed.state_name(ct).to_string(),
                        ));
                        let event = &closed.alphabet()[e].name;
                        witnesses.push(Witness {
                            property: "safety".into(),
                            path,
                            message: format!(
                                "event {event} is possible in the closed loop but not in the requirements-restricted plant"
                            ),
                        });
                        break 'safety;
                    }
                }
            }
        }
    }

    // Controllability: the closed loop may never disable an uncontrollable
    // event the uncontrolled plant enables.
    let mut controllable = true;
    {
        let event_in_plant: Vec<Option<usize>> = closed
            .alphabet()
            .iter()
            .map(|e| plant.event_index_of(&e.name))
            .collect();
        let closed_event_of_plant: HashMap<usize, usize> = closed
            .alphabet()
            .iter()
            .enumerate()
            .filter_map(|(i, e)| plant.event_index_of(&e.name).map(|pe| (pe, i)))
            .collect();
        let start = (closed.initial_index(), plant.initial_index());
        let mut seen: HashSet<(usize, usize)> = HashSet::from([start]);
        let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        'ctrl: while let Some((c, p)) = queue.pop_front() {
            for &pe in plant.row(p).keys() {
                if plant.alphabet()[pe].controllable {
                    continue;
                }
                let enabled = closed_event_of_plant
                    .get(&pe)
                    .map(|ce| closed.row(c).contains_key(ce))
                    .unwrap_or(false);
                if !enabled {
                    controllable = false;
                    let path = backtrack(&closed, &parent, c);
                    let event = &plant.alphabet()[pe].name;
                    witnesses.push(Witness {
                        property: "controllability".into(),
                        path,
                        message: format!(
                            "uncontrollable event {event} is possible in the plant but disabled by the closed loop at state {}",
                            closed.state_name(c)
                        ),
                    });
                    break 'ctrl;
                }
            }
            for (&e, &ct) in closed.row(c).iter() {
                let Some(pe) = event_in_plant[e] else { continue };
                let Some(&ptarget) = plant.row(p).get(&pe) else { continue };
                if seen.insert((ct, ptarget)) {
                    parent.entry(ct).or_insert((c, e));
                    queue.push_back((ct, ptarget));
                }
            }
        }
    }

    // Nonblocking: every reachable closed-loop state reaches a marked state.
    let coreach = closed.coreachable_flags();
    let blocked = shortest_path_to(&closed, |q| !coreach[q]);
    let nonblocking = match blocked {
        None => true,
        Some(path) => {
            let state = path
                .last()
                .map(|(_, _, t)| t.clone())
                .unwrap_or_else(|| closed.initial().to_string());
            witnesses.push(Witness {
                property: "nonblocking".into(),
                path,
                message: format!("state {state} cannot reach a marked state"),
            });
            false
        }
    };

    // Maximal permissiveness: only meaningful for otherwise valid solutions.
    let maximally_permissive = if opts.check_maximality && safe && controllable && nonblocking {
        match supremal_by_enumeration(cp) {
            Err(OracleError::TooLargeForEnumeration { .. }) => None,
            Err(e) => return Err(e),
            Ok(None) => {
                witnesses.push(Witness {
                    property: "maximal-permissiveness".into(),
                    path: Vec::new(),
                    message: "no controllable nonblocking supervisor exists for this problem"
                        .into(),
                });
                Some(false)
            }
            Ok(Some(supremum)) => {
                if let Some((path, event)) = first_missing_behavior(&supremum, &closed) {
                    witnesses.push(Witness {
                        property: "maximal-permissiveness".into(),
                        path,
                        message: format!(
                            "the maximally permissive supervisor allows event {event} here but the closed loop does not"
                        ),
                    });
                    Some(false)
                } else {
                    Some(true)
                }
            }
        }
    } else {
        None
    };

    Ok(VerificationVerdict { safe, controllable, nonblocking, maximally_permissive, witnesses })
}

/// Transition path as (from, event, to) name triples.
type StepPath = Vec<(String, String, String)>;

/// Searches for behavior of `larger` missing from `smaller`; returns the
/// path in `larger` up to the divergence plus the missing event name.
fn first_missing_behavior(
    larger: &Automaton,
    smaller: &Automaton,
) -> Option<(StepPath, String)> {
    let event_in_smaller: Vec<Option<usize>> = larger
        .alphabet()
        .iter()
        .map(|e| smaller.event_index_of(&e.name))
        .collect();
    let start = (larger.initial_index(), smaller.initial_index());
    let mut seen: HashSet<(usize, usize)> = HashSet::from([start]);
    let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some((l, s)) = queue.pop_front() {
        for (&e, &lt) in larger.row(l).iter() {
            let st = event_in_smaller[e].and_then(|se| smaller.row(s).get(&se).copied());
            match st {
                Some(st) => {
                    if seen.insert((lt, st)) {
                        parent.entry(lt).or_insert((l, e));
                        queue.push_back((lt, st));
                    }
                }
                None => {
                    let path = backtrack(larger, &parent, l);
                    return Some((path, larger.alphabet()[e].name.clone()));
                }
            }
        }
    }
    None
}

/// Whether a set of supervisors can disagree: true iff their composition is
/// nonblocking. An empty list is trivially nonconflicting.
pub fn is_nonconflicting(
    supervisors: &[Automaton],
    opts: &VerifyOptions,
) -> Result<bool, OracleError> {
    if supervisors.is_empty() {
        return Ok(true);
    }
    let composed = compose_all_bounded(supervisors, opts.bound).map_err(|e| match e {
        AutomatonError::SizeBound { bound } => OracleError::SizeBound { bound },
        other => OracleError::Model(other),
    })?;
    Ok(is_nonblocking(&composed))
}

const ENUMERATION_LIMIT: usize = 16;

/// Exhaustive-search supremum: enumerates every subset of the closed loop's
/// controllable transitions (uncontrollable ones are never up for deletion),
/// keeps the candidates that are controllable against the uncontrolled plant
/// and nonblocking, and returns the one dominating all others — the
/// assumption-free ground truth for maximal permissiveness. `None` when no
/// candidate is valid. Limited to [`ENUMERATION_LIMIT`] controllable
/// transitions.
pub fn supremal_by_enumeration(cp: &ControlProblem) -> Result<Option<Automaton>, OracleError> {
    let plant = compose_all_bounded(cp.plants(), 1_000_000).map_err(|e| match e {
        AutomatonError::SizeBound { bound } => OracleError::SizeBound { bound },
        other => OracleError::Model(other),
    })?;
    let pr = apply_requirements_keeping_states(&plant, cp.requirements(), cp.plants())?
        .restrict_to_reachable();
    let n = pr.num_states();
    // Event indices agree between plant and pr; state indices do not.
    let plant_state: Vec<usize> = (0..n)
        .map(|q| plant.state_index_of(pr.state_name(q)).expect("pr states come from the plant"))
        .collect();

    let controllable_transitions: Vec<(usize, usize)> = (0..n)
        .flat_map(|q| {
            pr.row(q)
                .keys()
                .filter(|&&e| pr.alphabet()[e].controllable)
                .map(move |&e| (q, e))
                .collect::<Vec<_>>()
        })
        .collect();
    if controllable_transitions.len() > ENUMERATION_LIMIT {
        return Err(OracleError::TooLargeForEnumeration {
            transitions: controllable_transitions.len(),
            limit: ENUMERATION_LIMIT,
        });
    }

    let base_rows: Vec<BTreeMap<usize, usize>> = (0..n).map(|q| pr.row(q).clone()).collect();
    let uncontrollable: Vec<usize> = pr
        .alphabet()
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.controllable)
        .map(|(i, _)| i)
        .collect();

    // A candidate sub-automaton: its transition rows plus the reachability
    // flags computed for them.
    type Candidate = (Vec<BTreeMap<usize, usize>>, Vec<bool>);

    // Reachable states of a candidate, or None if it is invalid.
    let evaluate = |mask: u64| -> Option<Candidate> {
        let mut rows = base_rows.clone();
        for (bit, &(q, e)) in controllable_transitions.iter().enumerate() {
            if mask & (1 << bit) == 0 {
                rows[q].remove(&e);
            }
        }
        let mut reach = vec![false; n];
        let mut queue = vec![pr.initial_index()];
        reach[pr.initial_index()] = true;
        let mut head = 0;
        while head < queue.len() {
            let q = queue[head];
            head += 1;
            for &t in rows[q].values() {
                if !reach[t] {
                    reach[t] = true;
                    queue.push(t);
                }
            }
        }
        // Controllability against the uncontrolled plant.
        for q in 0..n {
            if !reach[q] {
                continue;
            }
            for &u in &uncontrollable {
                if plant.row(plant_state[q]).contains_key(&u) && !rows[q].contains_key(&u) {
                    return None;
                }
            }
        }
        // Nonblocking: every reachable state reaches a marked state.
        let mut coreach = vec![false; n];
        let mut queue: Vec<usize> =
            (0..n).filter(|&q| reach[q] && pr.marked_flag(q)).collect();
        for &q in &queue {
            coreach[q] = true;
        }
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            if !reach[q] {
                continue;
            }
            for &t in rows[q].values() {
                if reach[t] {
                    pred[t].push(q);
                }
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let q = queue[head];
            head += 1;
            for &p in &pred[q] {
                if !coreach[p] {
                    coreach[p] = true;
                    queue.push(p);
                }
            }
        }
        if (0..n).any(|q| reach[q] && !coreach[q]) {
            return None;
        }
        Some((rows, reach))
    };

    // Sub-automata of one deterministic base: language inclusion is row-wise
    // transition inclusion over the smaller one's reachable states.
    let included = |a: &Candidate, b: &Candidate| {
        (0..n).all(|q| {
            !a.1[q] || a.0[q].iter().all(|(e, t)| b.0[q].get(e) == Some(t))
        })
    };

    let total = 1u64 << controllable_transitions.len();
    let mut best: Option<(u64, Candidate)> = None;
    for mask in 0..total {
        if let Some(candidate) = evaluate(mask) {
            match &best {
                None => best = Some((mask, candidate)),
                Some((_, b)) => {
                    if !included(&candidate, b) {
                        best = Some((mask, candidate));
                    }
                }
            }
        }
    }
    let Some((best_mask, best_candidate)) = best else {
        return Ok(None);
    };
    // The supremum exists and is a candidate, so the survivor of the greedy
    // sweep must dominate every valid candidate.
    for mask in 0..total {
        if let Some(candidate) = evaluate(mask) {
            assert!(
                included(&candidate, &best_candidate),
                "exhaustive search found incomparable maximal candidates"
            );
        }
    }

    let removed: BTreeSet<(usize, usize)> = controllable_transitions
        .iter()
        .enumerate()
        .filter(|(bit, _)| best_mask & (1 << bit) == 0)
        .map(|(_, &t)| t)
        .collect();
    let keep: Vec<usize> = (0..n).filter(|&q| best_candidate.1[q]).collect();
    let mut supremum = pr.without_transitions(&removed).restrict_to(&keep).restrict_to_reachable();
    supremum.set_name("K");
    Ok(Some(supremum))
}

// ---------------------------------------------------------------------------
// Seeded instance generators.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
enum FlagMode {
    AllControllable,
    AllUncontrollable,
    Mixed,
}

struct EventPool {
    next: usize,
}

impl EventPool {
    fn new() -> Self {
        EventPool { next: 0 }
    }

    fn fresh(&mut self, controllable: bool) -> EventId {
        let id = EventId { name: format!("e{}", self.next), controllable };
        self.next += 1;
        id
    }
}

/// Strongly connected random plant: a full cycle through all states plus
/// random chord transitions, every transition on its own fresh event, at
/// least one marked state.
fn random_plant(
    rng: &mut ChaCha8Rng,
    pool: &mut EventPool,
    name: &str,
    n_states: usize,
    mode: FlagMode,
) -> Automaton {
    let states: Vec<String> = (0..n_states).map(|j| format!("s{j}")).collect();
    let flag = |rng: &mut ChaCha8Rng| match mode {
        FlagMode::AllControllable => true,
        FlagMode::AllUncontrollable => false,
        FlagMode::Mixed => rng.gen_bool(0.5),
    };
    let mut alphabet = Vec::new();
    let mut transitions = Vec::new();
    for j in 0..n_states {
        let e = pool.fresh(flag(rng));
        transitions.push((states[j].clone(), e.name.clone(), states[(j + 1) % n_states].clone()));
        alphabet.push(e);
    }
    for j in 0..n_states {
        if rng.gen_bool(0.35) {
            let e = pool.fresh(flag(rng));
            let target = rng.gen_range(0..n_states);
            transitions.push((states[j].clone(), e.name.clone(), states[target].clone()));
            alphabet.push(e);
        }
    }
    let mut marked: Vec<String> =
        states.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
    if marked.is_empty() {
        marked.push(states[rng.gen_range(0..n_states)].clone());
    }
    // Canonical alphabet order (controllable first), matching what the text
    // format can express, so generated instances round-trip structurally.
    alphabet.sort_by_key(|e| !e.controllable);
    Automaton::new(name, states.clone(), alphabet, transitions, &states[0], marked)
        .expect("generated plant is well-formed")
}

fn random_condition(
    rng: &mut ChaCha8Rng,
    plants: &[Automaton],
    candidates: &[usize],
    allow_negation: bool,
) -> Condition {
    let n_disjuncts = rng.gen_range(1..=2);
    let mut disjuncts = Vec::new();
    for _ in 0..n_disjuncts {
        let width = rng.gen_range(1..=candidates.len().min(2));
        let mut picks = candidates.to_vec();
        picks.shuffle(rng);
        picks.truncate(width);
        let conj = picks
            .into_iter()
            .map(|pi| {
                let p = &plants[pi];
                let state = p.states()[rng.gen_range(0..p.num_states())].clone();
                if allow_negation && p.num_states() > 1 && rng.gen_bool(0.3) {
                    Literal::negated_state_ref(p.name(), &state)
                } else {
                    Literal::state_ref(p.name(), &state)
                }
            })
            .collect();
        disjuncts.push(conj);
    }
    Condition::new(disjuncts).expect("non-empty by construction")
}

/// Random problem satisfying the full structural property set by
/// construction: a sensor/actuator split, strongly connected plants with
/// marked states, each requirement restricting a distinct controllable
/// actuator event under a DNF over sensor states. Deterministic per seed.
/// The requirement count is capped by the available controllable events; a
/// single-plant problem is requirement-free.
pub fn generate_cnms_instance(seed: u64, plants: usize, requirements: usize) -> ControlProblem {
    assert!(plants >= 1, "at least one plant");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = EventPool::new();

    let effective_requirements = if plants < 2 { 0 } else { requirements };
    let n_actuators =
        if plants < 2 { plants } else { rng.gen_range(1..plants) };
    let mut roles: Vec<FlagMode> = (0..plants)
        .map(|i| {
            if i < n_actuators { FlagMode::AllControllable } else { FlagMode::AllUncontrollable }
        })
        .collect();
    if effective_requirements == 0 {
        roles.shuffle(&mut rng);
    }

    let plant_list: Vec<Automaton> = roles
        .iter()
        .enumerate()
        .map(|(i, &mode)| {
            let n_states = rng.gen_range(2..=4);
            random_plant(&mut rng, &mut pool, &format!("P{}", i + 1), n_states, mode)
        })
        .collect();

    let sensors: Vec<usize> = roles
        .iter()
        .enumerate()
        .filter(|(_, m)| matches!(m, FlagMode::AllUncontrollable))
        .map(|(i, _)| i)
        .collect();
    let mut event_pool: Vec<String> = roles
        .iter()
        .enumerate()
        .filter(|(_, m)| matches!(m, FlagMode::AllControllable))
        .flat_map(|(i, _)| plant_list[i].alphabet().iter().map(|e| e.name.clone()))
        .collect();
    event_pool.shuffle(&mut rng);

    let mut reqs = Vec::new();
    for (k, event) in event_pool.into_iter().take(effective_requirements).enumerate() {
        let condition = random_condition(&mut rng, &plant_list, &sensors, true);
        reqs.push(StateEventInvariant::new(
            format!("R{}", k + 1),
            EventId { name: event, controllable: true },
            condition,
        ));
    }
    ControlProblem::new(plant_list, reqs).expect("generated problem is well-formed")
}

/// Random problem satisfying the relaxed structural property set with an
/// acyclic, self-loop-free dependency graph: mixed-flag plants in a random
/// topological order, each requirement owned by an earlier plant and
/// referencing only strictly later plants. Deterministic per seed; the
/// requirement count is capped by the available controllable events.
pub fn generate_acyclic_rcnms_instance(
    seed: u64,
    plants: usize,
    requirements: usize,
) -> ControlProblem {
    assert!(plants >= 1, "at least one plant");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = EventPool::new();

    let plant_list: Vec<Automaton> = (0..plants)
        .map(|i| {
            let n_states = rng.gen_range(2..=4);
            random_plant(&mut rng, &mut pool, &format!("P{}", i + 1), n_states, FlagMode::Mixed)
        })
        .collect();

    let mut order: Vec<usize> = (0..plants).collect();
    order.shuffle(&mut rng);
    let mut position = vec![0usize; plants];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos;
    }

    let mut event_pool: Vec<(usize, String)> = (0..plants)
        .filter(|&i| position[i] + 1 < plants)
        .flat_map(|i| {
            plant_list[i]
                .alphabet()
                .iter()
                .filter(|e| e.controllable)
                .map(move |e| (i, e.name.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    event_pool.shuffle(&mut rng);

    let mut reqs = Vec::new();
    for (k, (owner, event)) in event_pool.into_iter().take(requirements).enumerate() {
        let later: Vec<usize> =
            (0..plants).filter(|&j| position[j] > position[owner]).collect();
        let condition = random_condition(&mut rng, &plant_list, &later, true);
        reqs.push(StateEventInvariant::new(
            format!("R{}", k + 1),
            EventId { name: event, controllable: true },
            condition,
        ));
    }
    ControlProblem::new(plant_list, reqs).expect("generated problem is well-formed")
}

/// Random problem satisfying the relaxed structural property set whose
/// dependency graph contains `pairs` planted two-cycles (mutually
/// referencing two-state plant pairs, blocking or nonblocking per pair), plus
/// `context` plants that may reference the pairs or strictly later context
/// plants. Deterministic per seed.
pub fn generate_cyclic_rcnms_instance(seed: u64, pairs: usize, context: usize) -> ControlProblem {
    assert!(pairs >= 1, "at least one planted cycle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = EventPool::new();

    let mut plants = Vec::new();
    let mut reqs = Vec::new();
    let mut req_counter = 0usize;
    let fresh_req = |reqs: &mut Vec<StateEventInvariant>,
                     counter: &mut usize,
                     event: &EventId,
                     condition: Condition| {
        *counter += 1;
        reqs.push(StateEventInvariant::new(
            format!("R{counter}"),
            event.clone(),
            condition,
        ));
    };

    for k in 0..pairs {
        let a = random_plant(
            &mut rng,
            &mut pool,
            &format!("P{}", 2 * k + 1),
            2,
            FlagMode::AllControllable,
        );
        let b = random_plant(
            &mut rng,
            &mut pool,
            &format!("P{}", 2 * k + 2),
            2,
            FlagMode::AllControllable,
        );
        // The cycle events s0 -> s1 and s1 -> s0 are the first two of each
        // alphabet; chords only add more ways around the same two states.
        let (a_fwd, a_back) = (a.alphabet()[0].clone(), a.alphabet()[1].clone());
        let (b_fwd, b_back) = (b.alphabet()[0].clone(), b.alphabet()[1].clone());
        let blocking_style = rng.gen_bool(0.5);
        if blocking_style {
            // Return only when the partner is away: a deadlocked 2-cycle.
            let ca = Condition::single(Literal::state_ref(b.name(), "s1"));
            let cb = Condition::single(Literal::state_ref(a.name(), "s1"));
            fresh_req(&mut reqs, &mut req_counter, &a_back, ca);
            fresh_req(&mut reqs, &mut req_counter, &b_back, cb);
        } else {
            // Leave only when the partner is home: live but still cyclic.
            let ca = Condition::single(Literal::state_ref(b.name(), "s0"));
            let cb = Condition::single(Literal::state_ref(a.name(), "s0"));
            fresh_req(&mut reqs, &mut req_counter, &a_fwd, ca);
            fresh_req(&mut reqs, &mut req_counter, &b_fwd, cb);
        }
        plants.push(a);
        plants.push(b);
    }

    let first_context = plants.len();
    for j in 0..context {
        plants.push(random_plant(
            &mut rng,
            &mut pool,
            &format!("C{}", j + 1),
            2,
            FlagMode::Mixed,
        ));
    }
    for j in 0..context {
        let idx = first_context + j;
        let controllable: Vec<EventId> = plants[idx]
            .alphabet()
            .iter()
            .filter(|e| e.controllable)
            .cloned()
            .collect();
        if controllable.is_empty() || !rng.gen_bool(0.7) {
            continue;
        }
        let event = controllable[rng.gen_range(0..controllable.len())].clone();
        let candidates: Vec<usize> =
            (0..first_context).chain(idx + 1..plants.len()).collect();
        if candidates.is_empty() {
            continue;
        }
        let condition = random_condition(&mut rng, &plants, &candidates, true);
        fresh_req(&mut reqs, &mut req_counter, &event, condition);
    }

    ControlProblem::new(plants, reqs).expect("generated problem is well-formed")
}

/// Small adversarial instance for the exhaustive-search oracle: at most ten
/// product states, at most twelve controllable closed-loop transitions,
/// arbitrary (possibly blocking, non-strongly-connected) shapes, requirements
/// on events of either controllability, constant literals included.
/// Deterministic per seed.
pub fn generate_small_instance(seed: u64) -> ControlProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut pool = EventPool::new();
        let two_plants = rng.gen_bool(0.6);
        let sizes: Vec<usize> = if two_plants {
            vec![rng.gen_range(2..=3), rng.gen_range(2..=3)]
        } else {
            vec![rng.gen_range(2..=6)]
        };
        let mut plants = Vec::new();
        for (i, &n_states) in sizes.iter().enumerate() {
            let states: Vec<String> = (0..n_states).map(|j| format!("s{j}")).collect();
            let n_events = rng.gen_range(1..=3);
            let mut alphabet: Vec<EventId> =
                (0..n_events).map(|_| pool.fresh(rng.gen_bool(0.5))).collect();
            alphabet.sort_by_key(|e| !e.controllable);
            let mut transitions = Vec::new();
            for q in &states {
                for e in &alphabet {
                    if rng.gen_bool(0.5) {
                        let target = states[rng.gen_range(0..n_states)].clone();
                        transitions.push((q.clone(), e.name.clone(), target));
                    }
                }
            }
            let marked: Vec<String> =
                states.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
            plants.push(
                Automaton::new(
                    format!("P{}", i + 1),
                    states.clone(),
                    alphabet,
                    transitions,
                    &states[0],
                    marked,
                )
                .expect("generated plant is well-formed"),
            );
        }

        let all_events: Vec<EventId> = plants
            .iter()
            .flat_map(|p| p.alphabet().iter().cloned())
            .collect();
        let n_reqs = rng.gen_range(0..=2);
        let mut reqs = Vec::new();
        for k in 0..n_reqs {
            let event = all_events[rng.gen_range(0..all_events.len())].clone();
            let n_disjuncts = rng.gen_range(1..=2);
            let mut disjuncts = Vec::new();
            for _ in 0..n_disjuncts {
                let width = rng.gen_range(1..=2);
                let mut conj = Vec::new();
                for _ in 0..width {
                    let roll: f64 = rng.gen();
                    let negated = rng.gen_bool(0.3);
                    let lit = if roll < 0.8 {
                        let pi = rng.gen_range(0..plants.len());
                        let p = &plants[pi];
                        let state = p.states()[rng.gen_range(0..p.num_states())].clone();
                        if negated {
                            Literal::negated_state_ref(p.name(), &state)
                        } else {
                            Literal::state_ref(p.name(), &state)
                        }
                    } else if roll < 0.9 {
                        Literal::true_lit()
                    } else {
                        Literal::false_lit()
                    };
                    conj.push(lit);
                }
                disjuncts.push(conj);
            }
            reqs.push(StateEventInvariant::new(
                format!("R{}", k + 1),
                event,
                Condition::new(disjuncts).expect("non-empty"),
            ));
        }
        let cp = match ControlProblem::new(plants, reqs) {
            Ok(cp) => cp,
            Err(_) => continue,
        };

        // Keep only instances the enumeration oracle can afford.
        let plant = compose_all_bounded(cp.plants(), 64).expect("small by construction");
        let pr = apply_requirements_keeping_states(&plant, cp.requirements(), cp.plants())
            .expect("validated")
            .restrict_to_reachable();
        let controllable_transitions = pr
            .transitions()
            .filter(|(_, e, _)| e.controllable)
            .count();
        if pr.num_states() <= 10 && controllable_transitions <= 12 {
            return cp;
        }
    }
}
