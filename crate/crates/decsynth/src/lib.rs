//! Supervisory control for discrete-event systems built from modular plants
//! and state-event invariant requirements.
//!
//! The library answers three questions about a control problem:
//!
//! 1. Is synthesis unnecessary? Two structural checkers ([`check_cnms`],
//!    [`check_rcnms`]) decide from the model shape alone whether composing
//!    the plants with the requirements already yields a controllable,
//!    nonblocking, maximally permissive supervisor.
//! 2. If not entirely, where is synthesis needed? A dependency graph over
//!    plants locates the cyclic cores, extends them backward to closure, and
//!    partitions the result into independent partial control problems
//!    ([`plan_reduction`]).
//! 3. What is the supervisor? A fixed-point synthesis routine ([`sup_cn`])
//!    computes the maximally permissive controllable nonblocking supervisor
//!    for any (partial) problem, and a verifier ([`verify_closed_loop`])
//!    checks safety, controllability, and nonblocking of a proposed solution
//!    with replayable counterexample witnesses.
//!
//! Models are plain automata ([`Automaton`]) combined by synchronous
//! composition ([`compose`], [`compose_all`]); requirements restrict one
//! controllable event by a DNF condition over plant states
//! ([`StateEventInvariant`]). A text format with parser and pretty-printer
//! ([`io`]) and seeded instance generators ([`oracle`]) round out the crate.

pub mod automata;
pub mod depgraph;
pub mod io;
pub mod oracle;
pub mod problem;
pub mod requirements;
pub mod synthesis;

#[cfg(test)]
pub(crate) mod testutil;

pub use automata::{
    compose, compose_all, compose_all_bounded, coreachable_states, is_controllable,
    is_nonblocking, is_strongly_connected, is_trim, language_equal, reachable_states, Automaton,
    AutomatonError, EventId, GlobalState,
};
pub use depgraph::{
    build_graph, cyclic_sccs, emit_dot, extend, is_acyclic_selfloop_free, quotient,
    simplify_partial_problem, DependencyGraph, DepGraphError, Edge, SccAnalysis, WClass,
};
pub use oracle::{
    closed_loop, generate_acyclic_rcnms_instance, generate_cnms_instance,
    generate_cyclic_rcnms_instance, generate_small_instance, is_nonconflicting, project_word,
    replay_witness, supremal_by_enumeration, verify_closed_loop, word_in_language, OracleError,
    VerificationVerdict, VerifyOptions, Witness,
};
pub use problem::{
    check_cnms, check_rcnms, classify_plant, is_product_system, ControlProblem, PlantClass,
    ProblemError, PropertyReport, PropertyTag, PropertyViolation,
};
pub use requirements::{
    compose_plant_with_requirements, decode_product_state, eval_condition, Condition, Literal,
    LiteralKind, RequirementError, StateEventInvariant,
};
pub use synthesis::{
    execute_plan, plan_reduction, sup_cn, sup_cn_modular, PartialProblem, Rationale,
    ReductionPlan, SynthesisError, SynthesisOptions, SynthesisResult, Verdict,
};
