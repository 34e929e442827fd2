//! Python bindings for the decsynth library.
//!
//! Every function takes model text in the `.dcp` format and returns plain
//! Python values (dicts, lists, strings) mirroring the CLI's JSON documents,
//! so results can be asserted or post-processed without extra parsing.
//!
//! Error mapping: malformed input (parse errors, models outside the
//! supported class, supervisor texts with requirement blocks) raises
//! `ValueError`; synthesis or verification giving up (empty supervisor,
//! state-space bound exceeded) raises `RuntimeError`.

// The #[pyfunction] expansion converts PyErr into PyErr in its trampoline;
// the lint fires on generated code we cannot change.
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use decsynth::io::{emit_report, export_supervisor, parse_model, pretty_print, ReportFormat};
use decsynth::{
    build_graph, check_cnms, check_rcnms, classify_plant, emit_dot, execute_plan,
    generate_acyclic_rcnms_instance, generate_cnms_instance, generate_cyclic_rcnms_instance,
    is_nonconflicting, plan_reduction, verify_closed_loop, Automaton, ControlProblem,
    SccAnalysis, SynthesisError, SynthesisOptions, VerifyOptions,
};

/// Converts a JSON value produced by the library's serializers into the
/// corresponding Python object.
fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<PyObject> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_py(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py(py)
            }
        }
        serde_json::Value::String(s) => s.into_py(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new_bound(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_py(py)
        }
    })
}

/// Parses model text, turning error diagnostics into a `ValueError` whose
/// message lists one diagnostic per line.
fn parse_or_raise(src: &str) -> PyResult<ControlProblem> {
    parse_model(src).into_result().map_err(|diags| {
        let msg: Vec<String> = diags.iter().filter(|d| d.is_error()).map(|d| d.to_string()).collect();
        PyValueError::new_err(msg.join("\n"))
    })
}

fn synthesis_error_to_py(e: SynthesisError) -> PyErr {
    match e {
        SynthesisError::EmptySupervisor | SynthesisError::SizeBound { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn synthesis_options(bound: Option<usize>) -> SynthesisOptions {
    bound.map(SynthesisOptions::with_bound).unwrap_or_default()
}

/// Parses model text and returns a structural summary:
/// `{"plants": [{name, class, states, transitions, initial, marked,
/// events: [{name, controllable}]}], "requirements": [{id, event}]}`.
#[pyfunction]
fn parse(py: Python<'_>, src: &str) -> PyResult<PyObject> {
    let cp = parse_or_raise(src)?;
    let plants = serde_json::Value::Array(
        cp.plants()
            .iter()
            .map(|p| {
                serde_json::json!({
                    "name": p.name(),
                    "class": format!("{:?}", classify_plant(p)),
                    "states": p.num_states(),
                    "transitions": p.num_transitions(),
                    "initial": p.initial(),
                    "marked": p.marked_states().collect::<Vec<_>>(),
                    "events": p.alphabet().iter().map(|e| serde_json::json!({
                        "name": e.name,
                        "controllable": e.controllable,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    );
    let requirements = serde_json::Value::Array(
        cp.requirements()
            .iter()
            .map(|r| serde_json::json!({ "id": r.id, "event": r.event.name }))
            .collect(),
    );
    json_to_py(py, &serde_json::json!({ "plants": plants, "requirements": requirements }))
}

/// Runs both structural checks and returns
/// `{"cnms": property_report, "rcnms": property_report}`; each report has
/// `satisfied` plus a list of violations tagged by property.
#[pyfunction]
fn check(py: Python<'_>, src: &str) -> PyResult<PyObject> {
    let cp = parse_or_raise(src)?;
    let doc = serde_json::json!({
        "cnms": serde_json::to_value(check_cnms(&cp)).expect("total"),
        "rcnms": serde_json::to_value(check_rcnms(&cp)).expect("total"),
    });
    json_to_py(py, &doc)
}

/// Renders the requirement dependency graph as DOT text, colored by role:
/// cyclic cores red, extension-only vertices purple, residual blue.
#[pyfunction]
fn graph_dot(src: &str) -> PyResult<String> {
    let cp = parse_or_raise(src)?;
    let graph = build_graph(&cp).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let analysis = SccAnalysis::analyze(&graph);
    Ok(emit_dot(&graph, Some(&analysis)))
}

/// Plans the reduction without synthesizing and returns the run report as a
/// dict: verdict, classes, residual, reduction percentages, and rationale.
#[pyfunction]
fn reduce(py: Python<'_>, src: &str) -> PyResult<PyObject> {
    let cp = parse_or_raise(src)?;
    let plan = plan_reduction(&cp).map_err(synthesis_error_to_py)?;
    let text = emit_report(&plan, &[], &[], ReportFormat::Json);
    let doc: serde_json::Value = serde_json::from_str(&text).expect("report is valid JSON");
    json_to_py(py, &doc)
}

/// Plans the reduction, synthesizes one supervisor per class, and returns
/// `{"report": run_report, "supervisors": [{"name", "text"}]}` where each
/// `text` is a standalone plant-only model in the `.dcp` format.
#[pyfunction]
#[pyo3(signature = (src, bound=None))]
fn synth(py: Python<'_>, src: &str, bound: Option<usize>) -> PyResult<PyObject> {
    let cp = parse_or_raise(src)?;
    let plan = plan_reduction(&cp).map_err(synthesis_error_to_py)?;
    let results = execute_plan(&cp, &plan, &synthesis_options(bound)).map_err(synthesis_error_to_py)?;
    let text = emit_report(&plan, &results, &[], ReportFormat::Json);
    let report: serde_json::Value = serde_json::from_str(&text).expect("report is valid JSON");
    let supervisors = serde_json::Value::Array(
        results
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.supervisor.name(),
                    "text": export_supervisor(&r.supervisor),
                })
            })
            .collect(),
    );
    json_to_py(py, &serde_json::json!({ "report": report, "supervisors": supervisors }))
}

/// Checks a closed loop: `src` is the problem text, `supervisors` a list of
/// plant-only model texts (as written by `synth`). Returns `{"verdict":
/// {safe, controllable, nonblocking, maximally_permissive, witnesses},
/// "nonconflicting": bool | None}` — `nonconflicting` is `None` unless two
/// or more supervisors were given; `maximally_permissive` is `None` unless
/// `maximality=True` and the other properties hold.
#[pyfunction]
#[pyo3(signature = (src, supervisors, maximality=false, bound=None))]
fn verify(
    py: Python<'_>,
    src: &str,
    supervisors: Vec<String>,
    maximality: bool,
    bound: Option<usize>,
) -> PyResult<PyObject> {
    let cp = parse_or_raise(src)?;
    let mut sups: Vec<Automaton> = Vec::new();
    for (i, text) in supervisors.iter().enumerate() {
        let sup_cp = parse_or_raise(text)?;
        if !sup_cp.requirements().is_empty() {
            return Err(PyValueError::new_err(format!(
                "supervisor {} contains requirement blocks; supervisor texts hold plant blocks only",
                i + 1
            )));
        }
        sups.extend(sup_cp.plants().iter().cloned());
    }
    let opts = VerifyOptions {
        bound: bound.unwrap_or(SynthesisOptions::default().bound),
        check_maximality: maximality,
    };
    let verdict =
        verify_closed_loop(&cp, &sups, &opts).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let nonconflicting = if sups.len() >= 2 {
        Some(is_nonconflicting(&sups, &opts).map_err(|e| PyRuntimeError::new_err(e.to_string()))?)
    } else {
        None
    };
    let doc = serde_json::json!({
        "verdict": serde_json::to_value(&verdict).expect("total"),
        "nonconflicting": nonconflicting,
    });
    json_to_py(py, &doc)
}

/// Generates a seeded instance that satisfies the strict structural form
/// (synthesis provably unnecessary) and returns its model text.
#[pyfunction]
fn generate_cnms(seed: u64, plants: usize, requirements: usize) -> String {
    pretty_print(&generate_cnms_instance(seed, plants, requirements))
}

/// Generates a seeded instance that satisfies the relaxed structural form
/// with an acyclic dependency graph and returns its model text.
#[pyfunction]
fn generate_acyclic(seed: u64, plants: usize, requirements: usize) -> String {
    pretty_print(&generate_acyclic_rcnms_instance(seed, plants, requirements))
}

/// Generates a seeded instance whose dependency graph contains `pairs`
/// two-plant cycles plus `context` acyclic plants and returns its model text.
#[pyfunction]
fn generate_cyclic(seed: u64, pairs: usize, context: usize) -> String {
    pretty_print(&generate_cyclic_rcnms_instance(seed, pairs, context))
}

#[pymodule]
fn decsynth_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(graph_dot, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(generate_cnms, m)?)?;
    m.add_function(wrap_pyfunction!(generate_acyclic, m)?)?;
    m.add_function(wrap_pyfunction!(generate_cyclic, m)?)?;
    Ok(())
}
