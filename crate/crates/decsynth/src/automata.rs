//! Deterministic finite automata, synchronous composition, and the
//! structural predicates (reachable, coreachable, trim, nonblocking,
//! strongly connected, controllable) used by every check and synthesis step.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A named event with its controllability flag.
///
/// Event names are globally unique within one model; two events are the same
/// event iff their names are equal. The controllability flag must be
/// consistent everywhere a name appears; composition rejects conflicts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventId {
    pub name: String,
    pub controllable: bool,
}

impl EventId {
    pub fn controllable(name: impl Into<String>) -> Self {
        EventId { name: name.into(), controllable: true }
    }

    pub fn uncontrollable(name: impl Into<String>) -> Self {
        EventId { name: name.into(), controllable: false }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("automaton {automaton}: empty state set")]
    EmptyStates { automaton: String },
    #[error("automaton {automaton}: empty alphabet")]
    EmptyAlphabet { automaton: String },
    #[error("automaton {automaton}: duplicate state {state}")]
    DuplicateState { automaton: String, state: String },
    #[error("automaton {automaton}: event {event} declared twice")]
    DuplicateEvent { automaton: String, event: String },
    #[error("automaton {automaton}: unknown state {state}")]
    UnknownState { automaton: String, state: String },
    #[error("automaton {automaton}: unknown event {event}")]
    UnknownEvent { automaton: String, event: String },
    #[error("automaton {automaton}: two transitions from {state} on {event}")]
    Nondeterministic { automaton: String, state: String, event: String },
    #[error("event {event} is controllable in one automaton and uncontrollable in another")]
    ControllabilityConflict { event: String },
    #[error("controllability check needs equal alphabets ({left} vs {right})")]
    AlphabetMismatch { left: String, right: String },
    #[error("composition of an empty sequence")]
    EmptyComposition,
    #[error("state-space bound exceeded: more than {bound} states explored")]
    SizeBound { bound: usize },
}

/// A deterministic automaton with partial transition function.
///
/// States and events are referenced by name in the public API; indices are an
/// internal detail. All construction goes through [`Automaton::new`], which
/// enforces well-formedness (non-empty states and alphabet, declared
/// endpoints and labels, determinism).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    states: Vec<String>,
    state_idx: HashMap<String, usize>,
    alphabet: Vec<EventId>,
    event_idx: HashMap<String, usize>,
    /// Per-state map event index -> target state index.
    trans: Vec<BTreeMap<usize, usize>>,
    initial: usize,
    marked: Vec<bool>,
}

impl Automaton {
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        alphabet: Vec<EventId>,
        transitions: Vec<(String, String, String)>,
        initial: impl Into<String>,
        marked: Vec<String>,
    ) -> Result<Self, AutomatonError> {
        let name = name.into();
        if states.is_empty() {
            return Err(AutomatonError::EmptyStates { automaton: name });
        }
        if alphabet.is_empty() {
            return Err(AutomatonError::EmptyAlphabet { automaton: name });
        }
        let mut state_idx = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if state_idx.insert(s.clone(), i).is_some() {
                return Err(AutomatonError::DuplicateState { automaton: name, state: s.clone() });
            }
        }
        let mut event_idx = HashMap::with_capacity(alphabet.len());
        for (i, e) in alphabet.iter().enumerate() {
            if event_idx.insert(e.name.clone(), i).is_some() {
                return Err(AutomatonError::DuplicateEvent {
                    automaton: name,
                    event: e.name.clone(),
                });
            }
        }
        let mut trans = vec![BTreeMap::new(); states.len()];
        for (from, ev, to) in &transitions {
            let f = *state_idx.get(from).ok_or_else(|| AutomatonError::UnknownState {
                automaton: name.clone(),
                state: from.clone(),
            })?;
            let e = *event_idx.get(ev).ok_or_else(|| AutomatonError::UnknownEvent {
                automaton: name.clone(),
                event: ev.clone(),
            })?;
            let t = *state_idx.get(to).ok_or_else(|| AutomatonError::UnknownState {
                automaton: name.clone(),
                state: to.clone(),
            })?;
            if trans[f].insert(e, t).is_some() {
                return Err(AutomatonError::Nondeterministic {
                    automaton: name,
                    state: from.clone(),
                    event: ev.clone(),
                });
            }
        }
        let initial = initial.into();
        let initial = *state_idx.get(&initial).ok_or_else(|| AutomatonError::UnknownState {
            automaton: name.clone(),
            state: initial.clone(),
        })?;
        let mut marked_flags = vec![false; states.len()];
        for m in &marked {
            let i = *state_idx.get(m).ok_or_else(|| AutomatonError::UnknownState {
                automaton: name.clone(),
                state: m.clone(),
            })?;
            marked_flags[i] = true;
        }
        Ok(Automaton {
            name,
            states,
            state_idx,
            alphabet,
            event_idx,
            trans,
            initial,
            marked: marked_flags,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> &[EventId] {
        &self.alphabet
    }

    pub fn initial(&self) -> &str {
        &self.states[self.initial]
    }

    pub fn has_state(&self, q: &str) -> bool {
        self.state_idx.contains_key(q)
    }

    pub fn has_event(&self, e: &str) -> bool {
        self.event_idx.contains_key(e)
    }

    pub fn event(&self, name: &str) -> Option<&EventId> {
        self.event_idx.get(name).map(|&i| &self.alphabet[i])
    }

    pub fn is_marked(&self, q: &str) -> Result<bool, AutomatonError> {
        let i = self.state_index(q)?;
        Ok(self.marked[i])
    }

    /// Marked states in declaration order.
    pub fn marked_states(&self) -> impl Iterator<Item = &str> {
        self.states.iter().enumerate().filter(|(i, _)| self.marked[*i]).map(|(_, s)| s.as_str())
    }

    /// All transitions as (from, event, to), in state then alphabet order.
    pub fn transitions(&self) -> impl Iterator<Item = (&str, &EventId, &str)> {
        self.trans.iter().enumerate().flat_map(move |(q, row)| {
            row.iter().map(move |(&e, &t)| {
                (self.states[q].as_str(), &self.alphabet[e], self.states[t].as_str())
            })
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(|row| row.len()).sum()
    }

    /// Outgoing transitions of one state, in alphabet order.
    pub fn transitions_from<'a>(
        &'a self,
        q: &str,
    ) -> Result<impl Iterator<Item = (&'a EventId, &'a str)> + 'a, AutomatonError> {
        let i = self.state_index(q)?;
        Ok(self.trans[i].iter().map(move |(&e, &t)| (&self.alphabet[e], self.states[t].as_str())))
    }

    /// The event names enabled at `q`, in alphabet order.
    pub fn enabled_events(&self, q: &str) -> Result<Vec<&str>, AutomatonError> {
        let i = self.state_index(q)?;
        Ok(self.trans[i].keys().map(|&e| self.alphabet[e].name.as_str()).collect())
    }

    /// The target of the transition from `q` on `e`, if defined.
    ///
    /// Faults on a state or event foreign to this automaton; a missing
    /// transition is `Ok(None)`.
    pub fn step(&self, q: &str, e: &str) -> Result<Option<&str>, AutomatonError> {
        let qi = self.state_index(q)?;
        let ei = *self.event_idx.get(e).ok_or_else(|| AutomatonError::UnknownEvent {
            automaton: self.name.clone(),
            event: e.to_string(),
        })?;
        Ok(self.trans[qi].get(&ei).map(|&t| self.states[t].as_str()))
    }

    fn state_index(&self, q: &str) -> Result<usize, AutomatonError> {
        self.state_idx.get(q).copied().ok_or_else(|| AutomatonError::UnknownState {
            automaton: self.name.clone(),
            state: q.to_string(),
        })
    }

    pub(crate) fn initial_index(&self) -> usize {
        self.initial
    }

    pub(crate) fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub(crate) fn state_index_of(&self, q: &str) -> Option<usize> {
        self.state_idx.get(q).copied()
    }

    pub(crate) fn marked_flag(&self, i: usize) -> bool {
        self.marked[i]
    }

    pub(crate) fn row(&self, i: usize) -> &BTreeMap<usize, usize> {
        &self.trans[i]
    }

    pub(crate) fn event_index_of(&self, e: &str) -> Option<usize> {
        self.event_idx.get(e).copied()
    }

    /// Copy of this automaton with the given (state index, event index)
    /// transitions removed. Internal building block for requirement
    /// application and synthesis pruning.
    pub(crate) fn without_transitions(&self, removed: &BTreeSet<(usize, usize)>) -> Automaton {
        let mut out = self.clone();
        for &(q, e) in removed {
            out.trans[q].remove(&e);
        }
        out
    }

    /// Restriction to the states reachable from the initial state.
    /// State order follows deterministic FIFO discovery order.
    pub(crate) fn restrict_to_reachable(&self) -> Automaton {
        let order = self.reachable_order();
        self.restrict_to(&order)
    }

    /// Restriction to `keep` (state indices listed in the desired order;
    /// must contain the initial state).
    pub(crate) fn restrict_to(&self, keep: &[usize]) -> Automaton {
        let mut old_to_new = vec![usize::MAX; self.states.len()];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old] = new;
        }
        let states: Vec<String> = keep.iter().map(|&i| self.states[i].clone()).collect();
        let mut trans = vec![BTreeMap::new(); keep.len()];
        for (new, &old) in keep.iter().enumerate() {
            for (&e, &t) in &self.trans[old] {
                if old_to_new[t] != usize::MAX {
                    trans[new].insert(e, old_to_new[t]);
                }
            }
        }
        let marked = keep.iter().map(|&i| self.marked[i]).collect();
        let state_idx = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Automaton {
            name: self.name.clone(),
            states,
            state_idx,
            alphabet: self.alphabet.clone(),
            event_idx: self.event_idx.clone(),
            trans,
            initial: old_to_new[self.initial],
            marked,
        }
    }

    /// Reachable state indices in FIFO discovery order (initial first).
    pub(crate) fn reachable_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for (&_e, &t) in &self.trans[q] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    pub(crate) fn reachable_flags(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        for i in self.reachable_order() {
            seen[i] = true;
        }
        seen
    }

    /// Backward closure from the marked states over all transitions.
    pub(crate) fn coreachable_flags(&self) -> Vec<bool> {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for (q, row) in self.trans.iter().enumerate() {
            for &t in row.values() {
                preds[t].push(q);
            }
        }
        let mut flag = vec![false; self.states.len()];
        let mut queue = VecDeque::new();
        for (i, &m) in self.marked.iter().enumerate() {
            if m {
                flag[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !flag[p] {
                    flag[p] = true;
                    queue.push_back(p);
                }
            }
        }
        flag
    }
}

/// Least fixed point of forward closure from the initial state.
pub fn reachable_states(aut: &Automaton) -> BTreeSet<String> {
    aut.reachable_order().into_iter().map(|i| aut.states[i].clone()).collect()
}

/// Least fixed point of backward closure from the marked states.
pub fn coreachable_states(aut: &Automaton) -> BTreeSet<String> {
    aut.coreachable_flags()
        .into_iter()
        .enumerate()
        .filter(|(_, f)| *f)
        .map(|(i, _)| aut.states[i].clone())
        .collect()
}

/// Every reachable state can reach a marked state.
pub fn is_nonblocking(aut: &Automaton) -> bool {
    let co = aut.coreachable_flags();
    aut.reachable_order().into_iter().all(|i| co[i])
}

/// All states reachable and coreachable.
pub fn is_trim(aut: &Automaton) -> bool {
    aut.reachable_flags().into_iter().all(|f| f) && aut.coreachable_flags().into_iter().all(|f| f)
}

/// From every state every other state can be reached (vacuous for one state).
pub fn is_strongly_connected(aut: &Automaton) -> bool {
    let n = aut.num_states();
    if n <= 1 {
        return true;
    }
    // Forward and backward closure from state 0 must each cover everything.
    let mut fwd = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    fwd[0] = true;
    while let Some(q) = queue.pop_front() {
        for &t in aut.row(q).values() {
            if !fwd[t] {
                fwd[t] = true;
                queue.push_back(t);
            }
        }
    }
    if !fwd.iter().all(|&f| f) {
        return false;
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in 0..n {
        for &t in aut.row(q).values() {
            preds[t].push(q);
        }
    }
    let mut bwd = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    bwd[0] = true;
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q] {
            if !bwd[p] {
                bwd[p] = true;
                queue.push_back(p);
            }
        }
    }
    bwd.into_iter().all(|f| f)
}

fn check_same_alphabet(k: &Automaton, g: &Automaton) -> Result<(), AutomatonError> {
    let mut ka: Vec<&EventId> = k.alphabet().iter().collect();
    let mut ga: Vec<&EventId> = g.alphabet().iter().collect();
    ka.sort();
    ga.sort();
    if ka != ga {
        return Err(AutomatonError::AlphabetMismatch {
            left: k.name().to_string(),
            right: g.name().to_string(),
        });
    }
    Ok(())
}

/// Controllability of `k` with respect to `g`: for every string of L(k) whose
/// extension by an uncontrollable event lies in L(g), the extension lies in
/// L(k) too. Checked by synchronized forward exploration of k x g.
pub fn is_controllable(k: &Automaton, g: &Automaton) -> Result<bool, AutomatonError> {
    check_same_alphabet(k, g)?;
    let mut seen = std::collections::HashSet::new();
    let start = (k.initial_index(), g.initial_index());
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some((kq, gq)) = queue.pop_front() {
        for &ge in g.row(gq).keys() {
            let ev = &g.alphabet()[ge];
            if ev.controllable {
                continue;
            }
            let enabled_in_k = k
                .event_index_of(&ev.name)
                .is_some_and(|ke| k.row(kq).contains_key(&ke));
            if !enabled_in_k {
                return Ok(false);
            }
        }
        // Follow transitions present in both (strings of L(k) whose g-run exists).
        for (&ke, &kt) in k.row(kq) {
            let name = &k.alphabet()[ke].name;
            if let Some(&gt) = g.event_index_of(name).and_then(|ge| g.row(gq).get(&ge)) {
                if seen.insert((kt, gt)) {
                    queue.push_back((kt, gt));
                }
            }
        }
    }
    Ok(true)
}

/// Generated- and marked-language equality, decided by synchronized
/// exploration of the two deterministic automata (bisimulation on reachable
/// parts). Alphabets may differ; an event missing from one alphabet can never
/// be enabled there, so equality still demands it stays disabled in the other.
pub fn language_equal(a: &Automaton, b: &Automaton) -> bool {
    let mut seen = HashMap::new();
    let start = (a.initial_index(), b.initial_index());
    seen.insert(start, ());
    let mut queue = VecDeque::from([start]);
    while let Some((aq, bq)) = queue.pop_front() {
        if a.marked_flag(aq) != b.marked_flag(bq) {
            return false;
        }
        let ae: BTreeSet<&str> =
            a.row(aq).keys().map(|&e| a.alphabet()[e].name.as_str()).collect();
        let be: BTreeSet<&str> =
            b.row(bq).keys().map(|&e| b.alphabet()[e].name.as_str()).collect();
        if ae != be {
            return false;
        }
        for ev in ae {
            let at = a.step(a.state_name(aq), ev).unwrap().unwrap();
            let bt = b.step(b.state_name(bq), ev).unwrap().unwrap();
            let pair = (a.state_index_of(at).unwrap(), b.state_index_of(bt).unwrap());
            if seen.insert(pair, ()).is_none() {
                queue.push_back(pair);
            }
        }
    }
    true
}

fn merged_alphabet(auts: &[&Automaton]) -> Result<Vec<EventId>, AutomatonError> {
    let mut merged: Vec<EventId> = Vec::new();
    let mut flags: HashMap<&str, bool> = HashMap::new();
    for aut in auts {
        for e in aut.alphabet() {
            match flags.get(e.name.as_str()) {
                None => {
                    flags.insert(&e.name, e.controllable);
                    merged.push(e.clone());
                }
                Some(&c) if c == e.controllable => {}
                Some(_) => {
                    return Err(AutomatonError::ControllabilityConflict { event: e.name.clone() })
                }
            }
        }
    }
    Ok(merged)
}

/// Synchronous composition: synchronize on shared events, interleave on
/// private ones. Builds only the part reachable from the initial pair;
/// composed states are named `"(left,right)"`; marked iff both components
/// are marked.
pub fn compose(g1: &Automaton, g2: &Automaton) -> Result<Automaton, AutomatonError> {
    let composed = compose_n(&[g1, g2], usize::MAX, |parts| format!("({},{})", parts[0], parts[1]))?;
    Ok(composed)
}

/// Left fold of [`compose`], flattened: composed states are named
/// `"(s1,...,sn)"`. A singleton sequence is returned unchanged, so component
/// fixtures keep their own state names. The result's language is invariant
/// under reordering of the input.
pub fn compose_all(auts: &[Automaton]) -> Result<Automaton, AutomatonError> {
    compose_all_bounded(auts, usize::MAX)
}

/// [`compose_all`] that fails with `SizeBound` once more than `bound` states
/// have been discovered.
pub fn compose_all_bounded(auts: &[Automaton], bound: usize) -> Result<Automaton, AutomatonError> {
    match auts.len() {
        0 => Err(AutomatonError::EmptyComposition),
        1 => Ok(auts[0].clone()),
        _ => {
            let refs: Vec<&Automaton> = auts.iter().collect();
            compose_n(&refs, bound, |parts| format!("({})", parts.join(",")))
        }
    }
}

/// n-ary synchronous composition by breadth-first exploration from the tuple
/// of initial states. `name_of` renders a composed state from its component
/// state names.
fn compose_n(
    auts: &[&Automaton],
    bound: usize,
    name_of: impl Fn(&[&str]) -> String,
) -> Result<Automaton, AutomatonError> {
    if auts.is_empty() {
        return Err(AutomatonError::EmptyComposition);
    }
    let alphabet = merged_alphabet(auts)?;
    // Per merged event: the components that carry it (index, local event index).
    let participants: Vec<Vec<(usize, usize)>> = alphabet
        .iter()
        .map(|e| {
            auts.iter()
                .enumerate()
                .filter_map(|(i, a)| a.event_index_of(&e.name).map(|le| (i, le)))
                .collect()
        })
        .collect();

    let start: Vec<usize> = auts.iter().map(|a| a.initial_index()).collect();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    index.insert(start.clone(), 0);
    tuples.push(start);
    let mut trans_out: Vec<(usize, usize, usize)> = Vec::new();
    let mut head = 0;
    while head < tuples.len() {
        let current = tuples[head].clone();
        for (ev, parts) in participants.iter().enumerate() {
            let mut next = current.clone();
            let mut enabled = true;
            for &(comp, local_ev) in parts {
                match auts[comp].row(current[comp]).get(&local_ev) {
                    Some(&t) => next[comp] = t,
                    None => {
                        enabled = false;
                        break;
                    }
                }
            }
            if !enabled {
                continue;
            }
            let target = match index.get(&next) {
                Some(&i) => i,
                None => {
                    let i = tuples.len();
                    if i >= bound {
                        return Err(AutomatonError::SizeBound { bound });
                    }
                    index.insert(next.clone(), i);
                    tuples.push(next);
                    i
                }
            };
            trans_out.push((head, ev, target));
        }
        head += 1;
    }

    let states: Vec<String> = tuples
        .iter()
        .map(|tuple| {
            let parts: Vec<&str> =
                tuple.iter().enumerate().map(|(c, &s)| auts[c].state_name(s)).collect();
            name_of(&parts)
        })
        .collect();
    let marked: Vec<bool> = tuples
        .iter()
        .map(|tuple| tuple.iter().enumerate().all(|(c, &s)| auts[c].marked_flag(s)))
        .collect();
    let mut trans = vec![BTreeMap::new(); states.len()];
    for (q, e, t) in trans_out {
        trans[q].insert(e, t);
    }
    let state_idx = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let event_idx = alphabet.iter().enumerate().map(|(i, e)| (e.name.clone(), i)).collect();
    let name = auts.iter().map(|a| a.name()).collect::<Vec<_>>().join("||");
    Ok(Automaton {
        name,
        states,
        state_idx,
        alphabet,
        event_idx,
        trans,
        initial: 0,
        marked,
    })
}

/// A total assignment of one state per plant, the evaluation context for
/// requirement conditions. Produced by decoding composed-product state names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalState {
    assignment: BTreeMap<String, String>,
}

impl GlobalState {
    pub fn new(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        GlobalState { assignment: pairs.into_iter().collect() }
    }

    pub fn get(&self, plant: &str) -> Option<&str> {
        self.assignment.get(plant).map(|s| s.as_str())
    }

    pub fn plants(&self) -> impl Iterator<Item = (&str, &str)> {
        self.assignment.iter().map(|(p, s)| (p.as_str(), s.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(name: &str, c: bool) -> EventId {
        EventId { name: name.into(), controllable: c }
    }

    fn s(x: &str) -> String {
        x.to_string()
    }

    /// Two-state plant q_a <-> q_b on events e_fwd/e_back, marked+initial q_a.
    fn two_state(name: &str, qa: &str, qb: &str, fwd: &str, back: &str) -> Automaton {
        Automaton::new(
            name,
            vec![s(qa), s(qb)],
            vec![ev(fwd, true), ev(back, true)],
            vec![(s(qa), s(fwd), s(qb)), (s(qb), s(back), s(qa))],
            qa,
            vec![s(qa)],
        )
        .unwrap()
    }

    /// The three-state component of the composition example: q1 -a-> q2,
    /// q2 -b-> q1, q2 -a-> q3, q3 -b-> q2; marked {q1,q3}, initial q1.
    pub(crate) fn three_state_plant() -> Automaton {
        Automaton::new(
            "P1",
            vec![s("q1"), s("q2"), s("q3")],
            vec![ev("a", true), ev("b", true)],
            vec![
                (s("q1"), s("a"), s("q2")),
                (s("q2"), s("b"), s("q1")),
                (s("q2"), s("a"), s("q3")),
                (s("q3"), s("b"), s("q2")),
            ],
            "q1",
            vec![s("q1"), s("q3")],
        )
        .unwrap()
    }

    #[test]
    fn step_follows_partial_transition_function() {
        let p1 = three_state_plant();
        assert_eq!(p1.step("q1", "a").unwrap(), Some("q2"));
        assert_eq!(p1.step("q1", "b").unwrap(), None);
        assert_eq!(p1.step("q1", "a").unwrap(), Some("q2"));
    }

    #[test]
    fn step_faults_on_foreign_names() {
        let p1 = three_state_plant();
        assert!(matches!(p1.step("qx", "a"), Err(AutomatonError::UnknownState { .. })));
        assert!(matches!(p1.step("q1", "z"), Err(AutomatonError::UnknownEvent { .. })));
    }

    #[test]
    fn construction_rejects_nondeterminism() {
        let err = Automaton::new(
            "X",
            vec![s("u"), s("v"), s("w")],
            vec![ev("a", true)],
            vec![(s("u"), s("a"), s("v")), (s("u"), s("a"), s("w"))],
            "u",
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, AutomatonError::Nondeterministic { .. }));
    }

    #[test]
    fn construction_rejects_empty_parts() {
        assert!(matches!(
            Automaton::new("X", vec![], vec![ev("a", true)], vec![], "u", vec![]),
            Err(AutomatonError::EmptyStates { .. })
        ));
        assert!(matches!(
            Automaton::new("X", vec![s("u")], vec![], vec![], "u", vec![]),
            Err(AutomatonError::EmptyAlphabet { .. })
        ));
    }

    #[test]
    fn compose_pair_explores_reachable_product() {
        let p1 = two_state("P1", "q1", "q2", "a", "b");
        let p2 = two_state("P2", "q3", "q4", "c", "d");
        let prod = compose(&p1, &p2).unwrap();
        assert_eq!(prod.num_states(), 4);
        assert_eq!(prod.num_transitions(), 8);
        assert_eq!(prod.initial(), "(q1,q3)");
        let marked: Vec<&str> = prod.marked_states().collect();
        assert_eq!(marked, vec!["(q1,q3)"]);
    }

    #[test]
    fn compose_synchronizes_shared_events() {
        // Shared event x: both must move; private events interleave.
        let g1 = Automaton::new(
            "G1",
            vec![s("u0"), s("u1")],
            vec![ev("x", true), ev("p", true)],
            vec![(s("u0"), s("p"), s("u1")), (s("u1"), s("x"), s("u0"))],
            "u0",
            vec![s("u0")],
        )
        .unwrap();
        let g2 = Automaton::new(
            "G2",
            vec![s("v0"), s("v1")],
            vec![ev("x", true)],
            vec![(s("v0"), s("x"), s("v1"))],
            "v0",
            vec![s("v0")],
        )
        .unwrap();
        let prod = compose(&g1, &g2).unwrap();
        // x is disabled at (u0,v0) because G1 does not enable it.
        assert_eq!(prod.step("(u0,v0)", "x").unwrap(), None);
        assert_eq!(prod.step("(u0,v0)", "p").unwrap(), Some("(u1,v0)"));
        assert_eq!(prod.step("(u1,v0)", "x").unwrap(), Some("(u0,v1)"));
        // After the shared step G2 is stuck in v1 (unmarked): x disabled again.
        assert_eq!(prod.step("(u0,v1)", "x").unwrap(), None);
    }

    #[test]
    fn compose_with_neutral_single_state_is_language_equal() {
        let g = three_state_plant();
        let unit = Automaton::new(
            "U",
            vec![s("u")],
            vec![ev("z_private", false)],
            vec![],
            "u",
            vec![s("u")],
        )
        .unwrap();
        let prod = compose(&g, &unit).unwrap();
        assert!(language_equal(&prod, &g));
    }

    #[test]
    fn compose_rejects_flag_conflicts() {
        let g1 = two_state("P1", "q1", "q2", "a", "b");
        let g2 = Automaton::new(
            "P2",
            vec![s("r")],
            vec![ev("a", false)],
            vec![(s("r"), s("a"), s("r"))],
            "r",
            vec![s("r")],
        )
        .unwrap();
        assert!(matches!(
            compose(&g1, &g2),
            Err(AutomatonError::ControllabilityConflict { .. })
        ));
    }

    #[test]
    fn compose_all_singleton_is_identity() {
        let p1 = three_state_plant();
        let c = compose_all(std::slice::from_ref(&p1)).unwrap();
        assert!(language_equal(&c, &p1));
        assert_eq!(c.states(), p1.states());
    }

    #[test]
    fn compose_all_is_order_insensitive_on_language() {
        let p1 = two_state("P1", "q1", "q2", "a", "b");
        let p2 = two_state("P2", "q3", "q4", "c", "d");
        let ab = compose_all(&[p1.clone(), p2.clone()]).unwrap();
        let ba = compose_all(&[p2, p1]).unwrap();
        assert!(language_equal(&ab, &ba));
    }

    #[test]
    fn compose_all_flattens_tuple_names() {
        let p1 = two_state("P1", "q1", "q2", "a", "b");
        let p2 = two_state("P2", "q3", "q4", "c", "d");
        let p3 = two_state("P3", "q5", "q6", "e", "f");
        let c = compose_all(&[p1, p2, p3]).unwrap();
        assert_eq!(c.initial(), "(q1,q3,q5)");
        assert_eq!(c.num_states(), 8);
    }

    #[test]
    fn compose_all_bounded_stops_at_bound() {
        let p1 = two_state("P1", "q1", "q2", "a", "b");
        let p2 = two_state("P2", "q3", "q4", "c", "d");
        let p3 = two_state("P3", "q5", "q6", "e", "f");
        assert!(matches!(
            compose_all_bounded(&[p1, p2, p3], 5),
            Err(AutomatonError::SizeBound { bound: 5 })
        ));
    }

    #[test]
    fn reachability_on_transitionless_automaton_is_initial_only() {
        let a = Automaton::new(
            "A",
            vec![s("u"), s("v")],
            vec![ev("a", true)],
            vec![],
            "u",
            vec![s("u")],
        )
        .unwrap();
        assert_eq!(reachable_states(&a), BTreeSet::from([s("u")]));
        assert_eq!(coreachable_states(&a), BTreeSet::from([s("u")]));
        assert!(!is_trim(&a));
        assert!(is_nonblocking(&a));
    }

    #[test]
    fn strong_connectivity_checks() {
        assert!(is_strongly_connected(&three_state_plant()));
        let unit = Automaton::new("U", vec![s("u")], vec![ev("a", true)], vec![], "u", vec![])
            .unwrap();
        assert!(is_strongly_connected(&unit));
        // Removing b: q2 -> q1 from the chain kills strong connectivity.
        let lower = Automaton::new(
            "L",
            vec![s("q1"), s("q2"), s("q3")],
            vec![ev("a", true), ev("b", true)],
            vec![
                (s("q1"), s("a"), s("q2")),
                (s("q2"), s("a"), s("q3")),
                (s("q3"), s("b"), s("q2")),
            ],
            "q1",
            vec![s("q1"), s("q3")],
        )
        .unwrap();
        assert!(!is_strongly_connected(&lower));
        assert!(is_trim(&lower));
    }

    #[test]
    fn controllability_basics() {
        let g = three_state_plant();
        assert!(is_controllable(&g, &g).unwrap());

        // G with uncontrollable u from initial; K lacking it is uncontrollable.
        let g = Automaton::new(
            "G",
            vec![s("x0"), s("x1")],
            vec![ev("u", false)],
            vec![(s("x0"), s("u"), s("x1"))],
            "x0",
            vec![s("x0")],
        )
        .unwrap();
        let k = Automaton::new("K", vec![s("x0")], vec![ev("u", false)], vec![], "x0", vec![s("x0")])
            .unwrap();
        assert!(!is_controllable(&k, &g).unwrap());
    }

    #[test]
    fn controllability_requires_equal_alphabets() {
        let g = two_state("G", "q1", "q2", "a", "b");
        let k = two_state("K", "q1", "q2", "a", "c");
        assert!(matches!(
            is_controllable(&k, &g),
            Err(AutomatonError::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn language_equality_detects_marking_differences() {
        let a = two_state("A", "q1", "q2", "a", "b");
        let mut differently_marked = a.clone();
        differently_marked.marked[1] = true;
        assert!(!language_equal(&a, &differently_marked));
        assert!(language_equal(&a, &a.clone()));
    }
}
