//! Supervisor synthesis and the reduction method that avoids it where the
//! model structure permits.
//!
//! [`sup_cn`] computes the maximally permissive controllable nonblocking
//! supervisor for a control problem as a greatest fixed point on the explicit
//! product. [`plan_reduction`] runs the three-step method: skip synthesis
//! when the full structural check passes, skip when the relaxed check passes
//! and the dependency graph is acyclic without self-loops, and otherwise cut
//! the problem down to one partial problem per dependency class.
//! [`execute_plan`] synthesizes one supervisor per partial problem.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::automata::{compose_all_bounded, Automaton, AutomatonError};
use crate::depgraph::{
    build_graph, is_acyclic_selfloop_free, simplify_partial_problem_detailed, DepGraphError,
    SccAnalysis,
};
use crate::problem::{check_cnms, check_rcnms, ControlProblem, PropertyReport};
use crate::requirements::{apply_requirements_keeping_states, RequirementError};

#[derive(Debug, Error, PartialEq)]
pub enum SynthesisError {
    #[error("no controllable nonblocking supervisor exists (the initial state was pruned)")]
    EmptySupervisor,
    #[error("product state space exceeds the bound of {bound} states")]
    SizeBound { bound: usize },
    #[error("problem fails the relaxed structural check; the reduction method does not apply")]
    NotApplicable { report: PropertyReport },
    #[error(transparent)]
    Model(#[from] AutomatonError),
    #[error(transparent)]
    Requirement(#[from] RequirementError),
    #[error(transparent)]
    Graph(#[from] DepGraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    /// Upper limit on explicit product states; exceeded problems are
    /// rejected, not approximated.
    pub bound: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { bound: 10_000_000 }
    }
}

impl SynthesisOptions {
    pub fn with_bound(bound: usize) -> Self {
        SynthesisOptions { bound }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    pub supervisor: Automaton,
    /// States of the composed plant before requirements and pruning.
    pub uncontrolled_size: usize,
    /// States of the final supervisor.
    pub controlled_size: usize,
    /// Controllable transitions disabled by the fixed point, keyed by
    /// surviving source state and event name.
    pub removed_transitions: Vec<(String, String)>,
    /// Fixed-point rounds, including the final round that found nothing.
    pub iterations: usize,
}

/// Maximally permissive controllable nonblocking supervisor, computed as a
/// greatest fixed point: start from the composed plant restricted by the
/// requirements, repeatedly remove states that cannot reach a marked state
/// and states from which the uncontrolled plant can fire an uncontrollable
/// event out of the surviving set, deleting controllable transitions into
/// removed states. The supervisor is the reachable part of the fixed point;
/// uncontrollable transitions are never deleted.
pub fn sup_cn(
    cp: &ControlProblem,
    opts: &SynthesisOptions,
) -> Result<SynthesisResult, SynthesisError> {
    let plant = compose_all_bounded(cp.plants(), opts.bound).map_err(|e| match e {
        AutomatonError::SizeBound { bound } => SynthesisError::SizeBound { bound },
        other => SynthesisError::Model(other),
    })?;
    let uncontrolled_size = plant.num_states();
    let pr = apply_requirements_keeping_states(&plant, cp.requirements(), cp.plants())?;

    let n = plant.num_states();
    let mut alive = pr.reachable_flags();
    let mut candidate: Vec<_> = (0..n).map(|q| pr.row(q).clone()).collect();
    let mut deleted: BTreeSet<(usize, usize)> = BTreeSet::new();
    let uncontrollable: Vec<usize> = plant
        .alphabet()
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.controllable)
        .map(|(i, _)| i)
        .collect();

    let mut iterations = 0usize;
    loop {
        iterations += 1;

        // Backward closure from the alive marked states over alive-to-alive
        // candidate transitions.
        let mut coreach = vec![false; n];
        let mut queue: Vec<usize> = (0..n).filter(|&q| alive[q] && pr.marked_flag(q)).collect();
        for &q in &queue {
            coreach[q] = true;
        }
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            if !alive[q] {
                continue;
            }
            for &t in candidate[q].values() {
                if alive[t] {
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

        let mut bad: Vec<usize> = Vec::new();
        for q in 0..n {
            if !alive[q] {
                continue;
            }
            let escapes = uncontrollable.iter().any(|&u| match plant.row(q).get(&u) {
                Some(&t) => !alive[t] || !candidate[q].contains_key(&u),
                None => false,
            });
            if !coreach[q] || escapes {
                bad.push(q);
            }
        }
        if bad.is_empty() {
            break;
        }
        for &q in &bad {
            alive[q] = false;
        }
        for q in 0..n {
            if !alive[q] {
                continue;
            }
            let doomed: Vec<usize> = candidate[q]
                .iter()
                .filter(|(&e, &t)| !alive[t] && plant.alphabet()[e].controllable)
                .map(|(&e, _)| e)
                .collect();
            for e in doomed {
                candidate[q].remove(&e);
                deleted.insert((q, e));
            }
        }
    }

    if !alive[plant.initial_index()] {
        return Err(SynthesisError::EmptySupervisor);
    }

    let keep: Vec<usize> = (0..n).filter(|&q| alive[q]).collect();
    let mut supervisor = pr.without_transitions(&deleted).restrict_to(&keep).restrict_to_reachable();
    supervisor.set_name("S");
    let surviving: BTreeSet<&str> = supervisor.states().iter().map(|s| s.as_str()).collect();
    let removed_transitions: Vec<(String, String)> = deleted
        .iter()
        .filter(|(q, _)| surviving.contains(pr.state_name(*q)))
        .map(|&(q, e)| (pr.state_name(q).to_string(), plant.alphabet()[e].name.clone()))
        .collect();
    let controlled_size = supervisor.num_states();

    Ok(SynthesisResult {
        supervisor,
        uncontrolled_size,
        controlled_size,
        removed_transitions,
        iterations,
    })
}

/// One synthesis per requirement, each against the full plant set. The
/// results are modular supervisors; whether they conflict is a separate
/// check.
pub fn sup_cn_modular(
    cp: &ControlProblem,
    opts: &SynthesisOptions,
) -> Result<Vec<SynthesisResult>, SynthesisError> {
    cp.requirements()
        .iter()
        .map(|r| {
            let sub = ControlProblem::new(cp.plants().to_vec(), vec![r.clone()])
                .expect("restriction of a valid problem");
            let mut result = sup_cn(&sub, opts)?;
            result.supervisor.set_name(format!("S_{}", r.id));
            Ok(result)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The full structural check passed: the plant composed with the
    /// requirements is already the supervisor.
    #[serde(rename = "SkipByCNMS")]
    SkipByCnms,
    /// The relaxed check passed and the dependency graph is acyclic without
    /// self-loops: synthesis is unnecessary.
    SkipByAcyclic,
    /// The relaxed check passed but the graph has cyclic cores: synthesize
    /// one supervisor per partition class.
    Sectionalize,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::SkipByCnms => write!(f, "SkipByCNMS"),
            Verdict::SkipByAcyclic => write!(f, "SkipByAcyclic"),
            Verdict::Sectionalize => write!(f, "Sectionalize"),
        }
    }
}

/// One synthesis task of a sectionalized problem: the class vertices, the
/// simplified problem restricted to them, and any weakening notes from the
/// simplification.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialProblem {
    pub name: String,
    pub vertices: Vec<String>,
    pub problem: ControlProblem,
    pub notes: Vec<String>,
}

/// The checker reports (and graph analysis, when one was built) behind a
/// reduction verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rationale {
    pub cnms: PropertyReport,
    pub rcnms: PropertyReport,
    pub analysis: Option<SccAnalysis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionPlan {
    pub verdict: Verdict,
    /// Non-empty only for [`Verdict::Sectionalize`].
    pub partial_problems: Vec<PartialProblem>,
    /// Plants needing no synthesis.
    pub residual: Vec<String>,
    pub rationale: Rationale,
}

/// The three-step reduction: skip when the full check passes; skip when the
/// relaxed check passes and the dependency graph is acyclic and
/// self-loop-free; otherwise sectionalize into one simplified partial problem
/// per dependency class. Fails with [`SynthesisError::NotApplicable`] when
/// the relaxed check fails.
pub fn plan_reduction(cp: &ControlProblem) -> Result<ReductionPlan, SynthesisError> {
    let cnms = check_cnms(cp);
    let rcnms = check_rcnms(cp);
    let all_plants: Vec<String> = cp.plants().iter().map(|p| p.name().to_string()).collect();

    if cnms.satisfied {
        return Ok(ReductionPlan {
            verdict: Verdict::SkipByCnms,
            partial_problems: Vec::new(),
            residual: all_plants,
            rationale: Rationale { cnms, rcnms, analysis: None },
        });
    }
    if !rcnms.satisfied {
        return Err(SynthesisError::NotApplicable { report: rcnms });
    }

    let graph = build_graph(cp)?;
    let analysis = SccAnalysis::analyze(&graph);
    if is_acyclic_selfloop_free(&graph) {
        return Ok(ReductionPlan {
            verdict: Verdict::SkipByAcyclic,
            partial_problems: Vec::new(),
            residual: all_plants,
            rationale: Rationale { cnms, rcnms, analysis: Some(analysis) },
        });
    }

    let mut partial_problems = Vec::new();
    for (i, class) in analysis.partition.iter().enumerate() {
        let (problem, notes) = simplify_partial_problem_detailed(cp, &class.vertices)?;
        partial_problems.push(PartialProblem {
            name: format!("W{}", i + 1),
            vertices: class.vertices.clone(),
            problem,
            notes,
        });
    }
    let residual = analysis.residual.clone();
    Ok(ReductionPlan {
        verdict: Verdict::Sectionalize,
        partial_problems,
        residual,
        rationale: Rationale { cnms, rcnms, analysis: Some(analysis) },
    })
}

/// Runs the plan: nothing to do for skip verdicts; for sectionalize, one
/// synthesis per partial problem, supervisors named S1, S2, ... in class
/// order. Partial problems are independent (classes share no plants), so
/// failures identify the class by name.
pub fn execute_plan(
    cp: &ControlProblem,
    plan: &ReductionPlan,
    opts: &SynthesisOptions,
) -> Result<Vec<SynthesisResult>, SynthesisError> {
    for partial in &plan.partial_problems {
        for v in &partial.vertices {
            if cp.plant_index(v).is_none() {
                return Err(SynthesisError::Graph(DepGraphError::UnknownVertex {
                    name: v.clone(),
                }));
            }
        }
    }
    let mut results = Vec::new();
    for (i, partial) in plan.partial_problems.iter().enumerate() {
        let mut result = sup_cn(&partial.problem, opts)?;
        result.supervisor.set_name(format!("S{}", i + 1));
        results.push(result);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{compose, is_nonblocking, language_equal, EventId};
    use crate::problem::ControlProblem;
    use crate::requirements::{compose_plant_with_requirements, Condition, Literal, StateEventInvariant};
    use crate::testutil::{
        cycle_plant, self_referencing_problem, strict_form_problem, mutual_pair_blocking, mutual_pair_nonblocking, pair_self_loop, twin_cycles_problem,
        names, needs,
    };

    fn opts() -> SynthesisOptions {
        SynthesisOptions::default()
    }

    fn closed_loop(cp: &ControlProblem) -> crate::automata::Automaton {
        let plant = crate::automata::compose_all(cp.plants()).unwrap();
        compose_plant_with_requirements(&plant, cp.requirements(), cp.plants()).unwrap()
    }

    #[test]
    fn blocking_pair_collapses_to_single_state() {
        let result = sup_cn(&mutual_pair_blocking(), &opts()).unwrap();
        assert_eq!(result.uncontrolled_size, 4);
        assert_eq!(result.controlled_size, 1);
        assert_eq!(result.iterations, 2);
        assert_eq!(
            result.removed_transitions,
            vec![
                ("(q1,q3)".to_string(), "a".to_string()),
                ("(q1,q3)".to_string(), "c".to_string()),
            ]
        );
        assert_eq!(result.supervisor.num_transitions(), 0);
        assert!(result.supervisor.is_marked(result.supervisor.initial()).unwrap());
    }

    #[test]
    fn nonblocking_pair_needs_no_pruning() {
        let cp = mutual_pair_nonblocking();
        let result = sup_cn(&cp, &opts()).unwrap();
        assert_eq!(result.uncontrolled_size, 4);
        assert_eq!(result.controlled_size, 3);
        assert_eq!(result.iterations, 1);
        assert!(result.removed_transitions.is_empty());
        assert!(language_equal(&result.supervisor, &closed_loop(&cp)));
        assert!(is_nonblocking(&result.supervisor));
    }

    #[test]
    fn self_loop_dichotomy() {
        assert!(!is_nonblocking(&closed_loop(&pair_self_loop("q3"))));
        assert!(is_nonblocking(&closed_loop(&pair_self_loop("q4"))));
    }

    #[test]
    fn six_plant_problem_prunes_to_two_states() {
        let cp = twin_cycles_problem();
        let result = sup_cn(&cp, &opts()).unwrap();
        assert_eq!(result.uncontrolled_size, 64);
        assert_eq!(result.controlled_size, 2);
        let disabled: Vec<&str> =
            result.removed_transitions.iter().map(|(_, e)| e.as_str()).collect();
        assert_eq!(disabled, vec!["i", "i"]);
    }

    #[test]
    fn no_requirements_keeps_trim_product_unchanged() {
        let cp = crate::testutil::problem(vec![
            cycle_plant("P1", "q1", "q2", "a", "b", true),
            cycle_plant("P2", "q3", "q4", "c", "d", false),
        ]);
        let result = sup_cn(&cp, &opts()).unwrap();
        assert_eq!(result.iterations, 1);
        assert!(result.removed_transitions.is_empty());
        let plant = crate::automata::compose_all(cp.plants()).unwrap();
        assert!(language_equal(&result.supervisor, &plant));
    }

    #[test]
    fn impossible_return_empties_the_supervisor() {
        let p = crate::automata::Automaton::new(
            "P",
            names(&["q1", "q2"]),
            vec![
                EventId { name: "a".into(), controllable: true },
                EventId { name: "b".into(), controllable: true },
            ],
            vec![
                ("q1".into(), "a".into(), "q2".into()),
                ("q2".into(), "b".into(), "q1".into()),
            ],
            "q1",
            names(&["q2"]),
        )
        .unwrap();
        let cp = ControlProblem::new(
            vec![p],
            vec![StateEventInvariant::new(
                "r1",
                EventId { name: "a".into(), controllable: true },
                Condition::single(Literal::false_lit()),
            )],
        )
        .unwrap();
        assert_eq!(sup_cn(&cp, &opts()).unwrap_err(), SynthesisError::EmptySupervisor);
    }

    #[test]
    fn uncontrollable_escape_propagates_to_the_initial_state() {
        let p = crate::automata::Automaton::new(
            "P",
            names(&["q1", "q2"]),
            vec![EventId { name: "u".into(), controllable: false }],
            vec![("q1".into(), "u".into(), "q2".into())],
            "q1",
            names(&["q1"]),
        )
        .unwrap();
        let cp = ControlProblem::new(vec![p], vec![]).unwrap();
        assert_eq!(sup_cn(&cp, &opts()).unwrap_err(), SynthesisError::EmptySupervisor);
    }

    #[test]
    fn size_bound_is_enforced() {
        let cp = twin_cycles_problem();
        let err = sup_cn(&cp, &SynthesisOptions::with_bound(10)).unwrap_err();
        assert_eq!(err, SynthesisError::SizeBound { bound: 10 });
    }

    #[test]
    fn modular_synthesis_returns_one_result_per_requirement() {
        let cp = twin_cycles_problem();
        let results = sup_cn_modular(&cp, &opts()).unwrap();
        assert_eq!(results.len(), 6);
        let r5 = &results[4];
        assert_eq!(r5.supervisor.name(), "S_R5");
        assert!(r5.removed_transitions.is_empty(), "R5 alone prunes nothing");
    }

    #[test]
    fn modular_equals_monolithic_for_single_requirement() {
        let cp = mutual_pair_nonblocking();
        let single = ControlProblem::new(
            cp.plants().to_vec(),
            vec![cp.requirements()[0].clone()],
        )
        .unwrap();
        let modular = sup_cn_modular(&single, &opts()).unwrap();
        let monolithic = sup_cn(&single, &opts()).unwrap();
        assert_eq!(modular.len(), 1);
        assert!(language_equal(&modular[0].supervisor, &monolithic.supervisor));
        assert_eq!(modular[0].uncontrolled_size, monolithic.uncontrolled_size);
        assert_eq!(modular[0].controlled_size, monolithic.controlled_size);
    }

    #[test]
    fn fully_conforming_problem_skips_outright() {
        let plan = plan_reduction(&strict_form_problem()).unwrap();
        assert_eq!(plan.verdict, Verdict::SkipByCnms);
        assert!(plan.partial_problems.is_empty());
        assert_eq!(plan.residual, names(&["P1", "P2", "P3"]));
        assert!(plan.rationale.cnms.satisfied);
        assert!(plan.rationale.analysis.is_none());
        assert!(execute_plan(&strict_form_problem(), &plan, &opts()).unwrap().is_empty());
    }

    #[test]
    fn acyclic_relaxed_problem_skips_via_graph() {
        let cp = ControlProblem::new(
            vec![
                cycle_plant("A1", "q1", "q2", "a", "b", true),
                cycle_plant("A2", "q3", "q4", "c", "d", true),
            ],
            vec![needs("r1", "a", true, "A2", "q4")],
        )
        .unwrap();
        let plan = plan_reduction(&cp).unwrap();
        assert_eq!(plan.verdict, Verdict::SkipByAcyclic);
        assert!(!plan.rationale.cnms.satisfied);
        assert!(plan.rationale.rcnms.satisfied);
        let analysis = plan.rationale.analysis.as_ref().unwrap();
        assert!(analysis.phis.is_empty());
        assert_eq!(plan.residual, names(&["A1", "A2"]));
    }

    #[test]
    fn self_referencing_requirement_sectionalizes_into_one_singleton_class() {
        let plan = plan_reduction(&self_referencing_problem()).unwrap();
        assert_eq!(plan.verdict, Verdict::Sectionalize);
        assert_eq!(plan.partial_problems.len(), 1);
        assert_eq!(plan.partial_problems[0].vertices, names(&["P1"]));
        assert!(plan.residual.is_empty());
    }

    #[test]
    fn six_plant_problem_sectionalizes_into_one_class() {
        let cp = twin_cycles_problem();
        let plan = plan_reduction(&cp).unwrap();
        assert_eq!(plan.verdict, Verdict::Sectionalize);
        assert_eq!(plan.partial_problems.len(), 1);
        assert_eq!(plan.partial_problems[0].name, "W1");
        assert_eq!(
            plan.partial_problems[0].vertices,
            names(&["P1", "P2", "P3", "P4", "P5", "P6"])
        );
        assert_eq!(plan.partial_problems[0].problem, cp);
        assert!(plan.residual.is_empty());

        let results = execute_plan(&cp, &plan, &opts()).unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].supervisor.name(), "S1");
        assert_eq!(results[0].controlled_size, 2);

        // The modular closed loop equals the monolithic supremum.
        let monolithic = sup_cn(&cp, &opts()).unwrap();
        let modular_loop = compose(&closed_loop(&cp), &results[0].supervisor).unwrap();
        assert!(language_equal(&modular_loop, &monolithic.supervisor));
    }

    #[test]
    fn relaxed_check_failure_is_not_applicable() {
        let cp = ControlProblem::new(
            vec![
                cycle_plant("Act", "i", "o", "go", "stop", true),
                cycle_plant("Sen", "lo", "hi", "rise", "fall", false),
            ],
            vec![needs("r1", "rise", false, "Act", "o")],
        )
        .unwrap();
        match plan_reduction(&cp).unwrap_err() {
            SynthesisError::NotApplicable { report } => {
                assert!(!report.satisfied);
            }
            other => panic!("expected NotApplicable, got {other:?}"),
        }
    }

    #[test]
    fn verdict_display_names_are_stable() {
        assert_eq!(Verdict::SkipByCnms.to_string(), "SkipByCNMS");
        assert_eq!(Verdict::SkipByAcyclic.to_string(), "SkipByAcyclic");
        assert_eq!(Verdict::Sectionalize.to_string(), "Sectionalize");
    }
}
