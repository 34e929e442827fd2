//! Canonical text form for control problems: deterministic ordering, LF
//! line endings, reparses to a structurally equal problem.

use crate::problem::ControlProblem;
use crate::requirements::{Condition, Literal, LiteralKind, StateEventInvariant};

fn push_name_list(out: &mut String, keyword: &str, names: &[&str]) {
    if names.is_empty() {
        return;
    }
    out.push_str("  ");
    out.push_str(keyword);
    for n in names {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
}

fn literal_text(lit: &Literal) -> String {
    let body = match &lit.kind {
        LiteralKind::StateRef { plant, state } => format!("{plant}.{state}"),
        LiteralKind::TrueLit => "T".to_string(),
        LiteralKind::FalseLit => "F".to_string(),
    };
    if lit.negated {
        format!("not {body}")
    } else {
        body
    }
}

pub(crate) fn condition_text(c: &Condition) -> String {
    c.disjuncts()
        .iter()
        .map(|conj| conj.iter().map(literal_text).collect::<Vec<_>>().join(" and "))
        .collect::<Vec<_>>()
        .join(" or ")
}

pub(crate) fn requirement_text(r: &StateEventInvariant) -> String {
    format!("requirement {}: {} needs {}", r.id, r.event.name, condition_text(&r.condition))
}

/// Serializes a control problem to canonical DSL text. Plants keep their
/// declared order; states, events, and transitions print in the model's own
/// (deterministic) order. A plant with no marked states omits the `marked`
/// line, which reparses as marked-at-initial; parsed problems always carry
/// at least one marked state, so parse ∘ pretty_print is identity on them.
pub fn pretty_print(cp: &ControlProblem) -> String {
    let mut out = String::new();
    for (i, p) in cp.plants().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("plant {} {{\n", p.name()));
        let states: Vec<&str> = p.states().iter().map(String::as_str).collect();
        push_name_list(&mut out, "states", &states);
        let marked: Vec<&str> = p
            .states()
            .iter()
            .filter(|s| p.is_marked(s).expect("own state"))
            .map(String::as_str)
            .collect();
        push_name_list(&mut out, "marked", &marked);
        out.push_str(&format!("  initial {}\n", p.initial()));
        let controllable: Vec<&str> = p
            .alphabet()
            .iter()
            .filter(|e| e.controllable)
            .map(|e| e.name.as_str())
            .collect();
        push_name_list(&mut out, "controllable", &controllable);
        let uncontrollable: Vec<&str> = p
            .alphabet()
            .iter()
            .filter(|e| !e.controllable)
            .map(|e| e.name.as_str())
            .collect();
        push_name_list(&mut out, "uncontrollable", &uncontrollable);
        for (from, e, to) in p.transitions() {
            out.push_str(&format!("  trans {from} - {} -> {to}\n", e.name));
        }
        out.push_str("}\n");
    }
    if !cp.requirements().is_empty() {
        out.push('\n');
        for r in cp.requirements() {
            out.push_str(&requirement_text(r));
            out.push('\n');
        }
    }
    out
}

/// Serializes a synthesized supervisor as a standalone plant-only model.
/// Composed tuple states are renamed to `s0..sN` so the output fits the
/// grammar; the original names are kept as a comment header.
pub fn export_supervisor(s: &crate::automata::Automaton) -> String {
    use crate::automata::Automaton;
    let renamed: Vec<String> = (0..s.num_states()).map(|i| format!("s{i}")).collect();
    let mut header = format!("// supervisor {}\n", s.name());
    for (old, new) in s.states().iter().zip(&renamed) {
        header.push_str(&format!("// {new} = {old}\n"));
    }
    let rename = |q: &str| {
        let idx = s.states().iter().position(|x| x == q).expect("own state");
        renamed[idx].clone()
    };
    let transitions: Vec<(String, String, String)> = s
        .transitions()
        .map(|(from, e, to)| (rename(from), e.name.clone(), rename(to)))
        .collect();
    let marked: Vec<String> = s
        .states()
        .iter()
        .filter(|q| s.is_marked(q).expect("own state"))
        .map(|q| rename(q))
        .collect();
    let renamed_aut = Automaton::new(
        s.name(),
        renamed.clone(),
        s.alphabet().to_vec(),
        transitions,
        rename(s.initial()),
        marked,
    )
    .expect("renaming preserves well-formedness");
    let cp = ControlProblem::new(vec![renamed_aut], vec![]).expect("single plant");
    format!("{header}{}", pretty_print(&cp))
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_model;
    use super::*;
    use crate::testutil::{self_referencing_problem, mutual_pair_blocking, twin_cycles_problem};

    fn assert_roundtrip(cp: &ControlProblem) {
        let text = pretty_print(cp);
        let outcome = parse_model(&text);
        assert!(!outcome.has_errors(), "{:?}\n{text}", outcome.diagnostics);
        let back = outcome.problem.unwrap();
        assert_eq!(back.plants(), cp.plants(), "{text}");
        assert_eq!(back.requirements(), cp.requirements(), "{text}");
        // Canonical form is a fixed point.
        assert_eq!(pretty_print(&back), text);
    }

    #[test]
    fn fixtures_round_trip() {
        assert_roundtrip(&self_referencing_problem());
        assert_roundtrip(&mutual_pair_blocking());
        assert_roundtrip(&twin_cycles_problem());
    }

    #[test]
    fn requirement_condition_prints_disjunction() {
        let cp = twin_cycles_problem();
        let r5 = cp.requirements().iter().find(|r| r.id == "R5").unwrap();
        assert_eq!(condition_text(&r5.condition), "P2.q4 or P3.q6");
        assert_eq!(requirement_text(r5), "requirement R5: j needs P2.q4 or P3.q6");
    }

    #[test]
    fn plant_block_shape_is_canonical() {
        let text = pretty_print(&self_referencing_problem());
        let expected = "\
plant P1 {
  states q1 q2 q3
  marked q1 q3
  initial q1
  controllable a b
  trans q1 - a -> q2
  trans q2 - a -> q3
  trans q2 - b -> q1
  trans q3 - b -> q2
}

requirement R1: b needs P1.q3
";
        assert_eq!(text, expected);
    }

    #[test]
    fn requirement_free_problem_prints_no_requirement_blocks() {
        let cp = crate::problem::ControlProblem::new(
            vec![crate::testutil::cycle_plant("P", "x", "y", "go", "back", true)],
            vec![],
        )
        .unwrap();
        let text = pretty_print(&cp);
        assert!(!text.contains("requirement"));
        assert_roundtrip(&cp);
    }

    #[test]
    fn uses_lf_only() {
        assert!(!pretty_print(&twin_cycles_problem()).contains('\r'));
    }
}
