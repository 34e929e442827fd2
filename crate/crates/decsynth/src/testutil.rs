//! Shared fixture builders for unit tests. The same models also exist as
//! text fixtures under `fixtures/`; integration tests parse those, while unit
//! tests construct them directly here.

use crate::automata::{Automaton, EventId};
use crate::problem::ControlProblem;
use crate::requirements::{Condition, Literal, StateEventInvariant};

pub(crate) fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn ev(name: &str, controllable: bool) -> EventId {
    EventId { name: name.into(), controllable }
}

/// Two states `qa` (initial, marked) and `qb`, with `fwd: qa -> qb` and
/// `back: qb -> qa`, both sharing one controllability flag.
pub(crate) fn cycle_plant(
    name: &str,
    qa: &str,
    qb: &str,
    fwd: &str,
    back: &str,
    controllable: bool,
) -> Automaton {
    Automaton::new(
        name,
        names(&[qa, qb]),
        vec![ev(fwd, controllable), ev(back, controllable)],
        vec![
            (qa.into(), fwd.into(), qb.into()),
            (qb.into(), back.into(), qa.into()),
        ],
        qa,
        names(&[qa]),
    )
    .unwrap()
}

pub(crate) fn problem(plants: Vec<Automaton>) -> ControlProblem {
    ControlProblem::new(plants, vec![]).unwrap()
}

/// `event needs plant.state`.
pub(crate) fn needs(
    id: &str,
    event: &str,
    controllable: bool,
    plant: &str,
    state: &str,
) -> StateEventInvariant {
    StateEventInvariant::new(
        id,
        ev(event, controllable),
        Condition::single(Literal::state_ref(plant, state)),
    )
}

/// `event needs p1.s1 or p2.s2 or ...` (positive literals only).
pub(crate) fn needs_any(
    id: &str,
    event: &str,
    controllable: bool,
    refs: &[(&str, &str)],
) -> StateEventInvariant {
    let disjuncts = refs
        .iter()
        .map(|&(p, s)| vec![Literal::state_ref(p, s)])
        .collect();
    StateEventInvariant::new(id, ev(event, controllable), Condition::new(disjuncts).unwrap())
}

/// Three-state plant: `a` walks q1 -> q2 -> q3, `b` walks back.
pub(crate) fn three_state_plant() -> Automaton {
    Automaton::new(
        "P1",
        names(&["q1", "q2", "q3"]),
        vec![ev("a", true), ev("b", true)],
        vec![
            ("q1".into(), "a".into(), "q2".into()),
            ("q2".into(), "b".into(), "q1".into()),
            ("q2".into(), "a".into(), "q3".into()),
            ("q3".into(), "b".into(), "q2".into()),
        ],
        "q1",
        names(&["q1", "q3"]),
    )
    .unwrap()
}

/// The self-referencing single-plant problem: `b needs P1.q3`.
pub(crate) fn self_referencing_problem() -> ControlProblem {
    ControlProblem::new(vec![three_state_plant()], vec![needs("R1", "b", true, "P1", "q3")]).unwrap()
}

/// One actuator restricted by the states of two sensors:
/// `mu needs P2.q1 or not P3.q1`.
pub(crate) fn strict_form_problem() -> ControlProblem {
    let p1 = cycle_plant("P1", "p0", "p1", "mu", "nu", true);
    let p2 = cycle_plant("P2", "q1", "q2", "c", "d", false);
    let p3 = cycle_plant("P3", "q1", "q2", "e", "f", false);
    let condition = Condition::new(vec![
        vec![Literal::state_ref("P2", "q1")],
        vec![Literal::negated_state_ref("P3", "q1")],
    ])
    .unwrap();
    ControlProblem::new(
        vec![p1, p2, p3],
        vec![StateEventInvariant::new("R", ev("mu", true), condition)],
    )
    .unwrap()
}

pub(crate) fn pair_plants() -> Vec<Automaton> {
    vec![
        cycle_plant("P1", "q1", "q2", "a", "b", true),
        cycle_plant("P2", "q3", "q4", "c", "d", true),
    ]
}

/// Mutually referencing pair with a blocking closed loop.
pub(crate) fn mutual_pair_blocking() -> ControlProblem {
    ControlProblem::new(
        pair_plants(),
        vec![
            needs("R1", "b", true, "P2", "q4"),
            needs("R2", "d", true, "P1", "q2"),
        ],
    )
    .unwrap()
}

/// Mutually referencing pair with a nonblocking closed loop.
pub(crate) fn mutual_pair_nonblocking() -> ControlProblem {
    ControlProblem::new(
        pair_plants(),
        vec![
            needs("R3", "a", true, "P2", "q3"),
            needs("R4", "c", true, "P1", "q1"),
        ],
    )
    .unwrap()
}

/// Self-loop variant: `R1` unchanged, `R2` references P2's own state. With
/// `target` = "q3" the closed loop blocks, with "q4" it does not.
pub(crate) fn pair_self_loop(target: &str) -> ControlProblem {
    ControlProblem::new(
        pair_plants(),
        vec![
            needs("R1", "b", true, "P2", "q4"),
            needs("R2", "d", true, "P2", target),
        ],
    )
    .unwrap()
}

/// Single plant whose requirement references its own state: a self-loop in
/// the dependency graph.
pub(crate) fn self_loop_problem() -> ControlProblem {
    ControlProblem::new(
        vec![cycle_plant("P1", "q1", "q2", "a", "b", true)],
        vec![needs("R1", "b", true, "P1", "q1")],
    )
    .unwrap()
}

/// Six two-state plants with two mutually referencing pairs (P1/P2 and
/// P3/P4), P5 referencing both pairs, and P6 referencing P5.
pub(crate) fn twin_cycles_problem() -> ControlProblem {
    let plants = vec![
        cycle_plant("P1", "q1", "q2", "a", "b", true),
        cycle_plant("P2", "q3", "q4", "c", "d", true),
        cycle_plant("P3", "q5", "q6", "e", "f", true),
        cycle_plant("P4", "q7", "q8", "g", "h", true),
        cycle_plant("P5", "q9", "q10", "i", "j", true),
        cycle_plant("P6", "q11", "q12", "k", "l", true),
    ];
    let requirements = vec![
        needs("R1", "a", true, "P2", "q4"),
        needs("R2", "c", true, "P1", "q2"),
        needs("R3", "e", true, "P4", "q8"),
        needs("R4", "g", true, "P3", "q6"),
        needs_any("R5", "j", true, &[("P2", "q4"), ("P3", "q6")]),
        needs("R6", "k", true, "P5", "q9"),
    ];
    ControlProblem::new(plants, requirements).unwrap()
}

/// The conflicting variant: P5 gains a second way back (`j2: q10 -> q9`) and
/// R5 is split into one requirement per return event.
pub(crate) fn twin_cycles_conflict_problem() -> ControlProblem {
    let p5 = Automaton::new(
        "P5",
        names(&["q9", "q10"]),
        vec![ev("i", true), ev("j", true), ev("j2", true)],
        vec![
            ("q9".into(), "i".into(), "q10".into()),
            ("q10".into(), "j".into(), "q9".into()),
            ("q10".into(), "j2".into(), "q9".into()),
        ],
        "q9",
        names(&["q9"]),
    )
    .unwrap();
    let plants = vec![
        cycle_plant("P1", "q1", "q2", "a", "b", true),
        cycle_plant("P2", "q3", "q4", "c", "d", true),
        cycle_plant("P3", "q5", "q6", "e", "f", true),
        cycle_plant("P4", "q7", "q8", "g", "h", true),
        p5,
        cycle_plant("P6", "q11", "q12", "k", "l", true),
    ];
    let requirements = vec![
        needs("R1", "a", true, "P2", "q4"),
        needs("R2", "c", true, "P1", "q2"),
        needs("R3", "e", true, "P4", "q8"),
        needs("R4", "g", true, "P3", "q6"),
        needs("R5a", "j", true, "P2", "q4"),
        needs("R5b", "j2", true, "P3", "q6"),
        needs("R6", "k", true, "P5", "q9"),
    ];
    ControlProblem::new(plants, requirements).unwrap()
}

/// Actuator restricted by a negated sensor reference; dropping the sensor
/// forces the weakening substitution.
pub(crate) fn negated_reference_problem() -> ControlProblem {
    ControlProblem::new(
        vec![
            cycle_plant("Act", "i", "o", "go", "stop", true),
            cycle_plant("Sen", "lo", "hi", "rise", "fall", false),
        ],
        vec![StateEventInvariant::new(
            "R1",
            ev("go", true),
            Condition::single(Literal::negated_state_ref("Sen", "hi")),
        )],
    )
    .unwrap()
}
