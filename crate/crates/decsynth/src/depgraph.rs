//! Dependency graphs over plants: one vertex per plant, and for every
//! requirement an edge from the plant owning the restricted event to each
//! plant referenced by the condition. Cycles in this graph are what force
//! synthesis; the analysis here finds the cyclic cores, extends them backward
//! to closure, merges overlapping extensions into independent classes, and
//! cuts control problems down to those classes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::problem::{ControlProblem, ProblemError};
use crate::requirements::{Condition, Literal, LiteralKind, StateEventInvariant};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DepGraphError {
    #[error("requirement {requirement}: event {event} is owned by several plants ({owners:?}); dependency graphs need a product system")]
    NonUniqueOwner { requirement: String, event: String, owners: Vec<String> },
    #[error("unknown plant {name} in vertex set")]
    UnknownVertex { name: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Directed edge: the plant owning the restricted event depends on a plant
/// referenced by the condition. `init`/`ter` index into the graph's plants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub init: usize,
    pub ter: usize,
    pub requirement: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    plant_names: Vec<String>,
    edges: Vec<Edge>,
}

impl DependencyGraph {
    pub fn plant_names(&self) -> &[String] {
        &self.plant_names
    }

    pub fn num_vertices(&self) -> usize {
        self.plant_names.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.plant_names.iter().position(|n| n == name)
    }

    /// Edges as (init plant, ter plant, requirement id) names.
    pub fn edge_names(&self) -> Vec<(&str, &str, &str)> {
        self.edges
            .iter()
            .map(|e| {
                (
                    self.plant_names[e.init].as_str(),
                    self.plant_names[e.ter].as_str(),
                    e.requirement.as_str(),
                )
            })
            .collect()
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges.iter().any(|e| e.init == e.ter)
    }

    /// Deduplicated successor lists, self-loops included.
    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.num_vertices()];
        for e in &self.edges {
            succ[e.init].insert(e.ter);
        }
        succ.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.num_vertices()];
        for e in &self.edges {
            pred[e.ter].insert(e.init);
        }
        pred.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    fn self_loop_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_vertices()];
        for e in &self.edges {
            if e.init == e.ter {
                flags[e.init] = true;
            }
        }
        flags
    }
}

/// Builds the dependency graph of a control problem: for each requirement,
/// edges run from the unique plant declaring the restricted event to every
/// plant the condition references, in requirement order then condition-plant
/// order. Faults if some restricted event is declared by several plants.
pub fn build_graph(cp: &ControlProblem) -> Result<DependencyGraph, DepGraphError> {
    let plant_names: Vec<String> = cp.plants().iter().map(|p| p.name().to_string()).collect();
    let mut edges = Vec::new();
    for r in cp.requirements() {
        let owners = cp.event_owners(&r.event.name);
        if owners.len() != 1 {
            return Err(DepGraphError::NonUniqueOwner {
                requirement: r.id.clone(),
                event: r.event.name.clone(),
                owners: owners.into_iter().map(|i| plant_names[i].clone()).collect(),
            });
        }
        let init = owners[0];
        for plant in r.condition_plants() {
            let ter = cp.plant_index(&plant).expect("validated at construction");
            edges.push(Edge { init, ter, requirement: r.id.clone() });
        }
    }
    Ok(DependencyGraph { plant_names, edges })
}

/// True iff the graph has no self-loop edge and no cycle of length two or
/// more. On relaxed-conforming problems this verdict alone certifies that the
/// plant composed with the requirements is already the supervisor.
pub fn is_acyclic_selfloop_free(g: &DependencyGraph) -> bool {
    !g.has_self_loop() && strongly_connected_components(g).iter().all(|c| c.len() < 2)
}

/// Iterative Tarjan; components in discovery order, vertices ascending.
fn strongly_connected_components(g: &DependencyGraph) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let succ = g.successors();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    for start in 0..n {
        if index[start] != UNSET {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = counter;
        lowlink[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.1 < succ[v].len() {
                let w = succ[v][frame.1];
                frame.1 += 1;
                if index[w] == UNSET {
                    index[w] = counter;
                    lowlink[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] && index[w] < lowlink[v] {
                    lowlink[v] = index[w];
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.0;
                    if lowlink[v] < lowlink[p] {
                        lowlink[p] = lowlink[v];
                    }
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}

/// The cyclic cores Φ: strongly connected components with at least two
/// vertices, plus single vertices carrying a self-loop edge (self-loops are
/// not cycles, but they can still block, so they are routed to synthesis).
/// Ordered by smallest contained vertex; vertices in plant order.
pub fn cyclic_sccs(g: &DependencyGraph) -> Vec<Vec<String>> {
    let loops = g.self_loop_flags();
    let mut comps: Vec<Vec<usize>> = strongly_connected_components(g)
        .into_iter()
        .filter(|c| c.len() >= 2 || loops[c[0]])
        .collect();
    comps.sort_by_key(|c| c[0]);
    comps
        .into_iter()
        .map(|c| c.into_iter().map(|v| g.plant_names()[v].clone()).collect())
        .collect()
}

/// Extends a vertex set backward to closure: every vertex with a (possibly
/// empty) path into `phi`. The set itself is always included.
pub fn extend(g: &DependencyGraph, phi: &[String]) -> Vec<String> {
    let pred = g.predecessors();
    let mut seen = vec![false; g.num_vertices()];
    let mut queue: Vec<usize> = Vec::new();
    for name in phi {
        let v = g.vertex_index(name).unwrap_or_else(|| panic!("unknown vertex {name}"));
        if !seen[v] {
            seen[v] = true;
            queue.push(v);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &p in &pred[v] {
            if !seen[p] {
                seen[p] = true;
                queue.push(p);
            }
        }
    }
    (0..g.num_vertices())
        .filter(|&v| seen[v])
        .map(|v| g.plant_names()[v].clone())
        .collect()
}

/// One class of the overlap quotient: the member extended sets (as indices
/// into the input list) and the union of their vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WClass {
    pub members: Vec<usize>,
    pub vertices: Vec<String>,
}

/// Quotient of extended vertex sets by the transitive closure of "shares at
/// least one vertex". Classes ordered by smallest member index; vertices of a
/// class are the sorted union of its members.
pub fn quotient(vsets: &[Vec<String>]) -> Vec<WClass> {
    let mut parent: Vec<usize> = (0..vsets.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, set) in vsets.iter().enumerate() {
        for v in set {
            match owner.get(v.as_str()) {
                None => {
                    owner.insert(v, i);
                }
                Some(&j) => {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..vsets.len() {
        let r = root(&mut parent, i);
        grouped.entry(r).or_default().push(i);
    }
    grouped
        .into_values()
        .map(|members| {
            let mut vertices: Vec<String> =
                members.iter().flat_map(|&i| vsets[i].iter().cloned()).collect();
            vertices.sort();
            vertices.dedup();
            WClass { members, vertices }
        })
        .collect()
}

/// Complete cyclic-core analysis of a dependency graph: the cores Φ, their
/// backward closures, the overlap quotient (one synthesis task per class),
/// and the residual vertices needing no synthesis at all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccAnalysis {
    pub phis: Vec<Vec<String>>,
    pub extended: Vec<Vec<String>>,
    pub partition: Vec<WClass>,
    pub residual: Vec<String>,
}

impl SccAnalysis {
    pub fn analyze(g: &DependencyGraph) -> SccAnalysis {
        let phis = cyclic_sccs(g);
        let extended: Vec<Vec<String>> = phis.iter().map(|phi| extend(g, phi)).collect();
        let mut partition = quotient(&extended);
        let by_plant: BTreeMap<&str, usize> = g
            .plant_names()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        for class in &mut partition {
            class.vertices.sort_by_key(|v| by_plant[v.as_str()]);
        }
        partition.sort_by_key(|c| by_plant[c.vertices[0].as_str()]);
        let covered: BTreeSet<&str> =
            partition.iter().flat_map(|c| c.vertices.iter().map(|v| v.as_str())).collect();
        let residual: Vec<String> = g
            .plant_names()
            .iter()
            .filter(|n| !covered.contains(n.as_str()))
            .cloned()
            .collect();
        SccAnalysis { phis, extended, partition, residual }
    }
}

/// Restricts a control problem to a vertex set: plants outside `keep` are
/// dropped, requirements survive iff their restricted event is owned by a
/// kept plant, and in surviving conditions every literal referencing a
/// dropped plant is replaced by the literal T. Substituting a negated
/// literal weakens the condition; each such substitution is reported in the
/// returned notes.
pub fn simplify_partial_problem_detailed(
    cp: &ControlProblem,
    keep: &[String],
) -> Result<(ControlProblem, Vec<String>), DepGraphError> {
    let mut keep_set: BTreeSet<&str> = BTreeSet::new();
    for name in keep {
        if cp.plant_index(name).is_none() {
            return Err(DepGraphError::UnknownVertex { name: name.clone() });
        }
        keep_set.insert(name);
    }
    let plants: Vec<_> =
        cp.plants().iter().filter(|p| keep_set.contains(p.name())).cloned().collect();
    let mut requirements = Vec::new();
    let mut notes = Vec::new();
    for r in cp.requirements() {
        let owners = cp.event_owners(&r.event.name);
        if owners.len() != 1 {
            return Err(DepGraphError::NonUniqueOwner {
                requirement: r.id.clone(),
                event: r.event.name.clone(),
                owners: owners.into_iter().map(|i| cp.plants()[i].name().to_string()).collect(),
            });
        }
        if !keep_set.contains(cp.plants()[owners[0]].name()) {
            continue;
        }
        let disjuncts: Vec<Vec<Literal>> = r
            .condition
            .disjuncts()
            .iter()
            .map(|conj| {
                conj.iter()
                    .map(|lit| match &lit.kind {
                        LiteralKind::StateRef { plant, state }
                            if !keep_set.contains(plant.as_str()) =>
                        {
                            if lit.negated {
                                notes.push(format!(
                                    "requirement {}: negated literal not {}.{} replaced by T; the condition is weaker than the original",
                                    r.id, plant, state
                                ));
                            }
                            Literal::true_lit()
                        }
                        _ => lit.clone(),
                    })
                    .collect()
            })
            .collect();
        requirements.push(StateEventInvariant::new(
            &r.id,
            r.event.clone(),
            Condition::new(disjuncts).expect("shape preserved"),
        ));
    }
    let problem = ControlProblem::new(plants, requirements)?;
    Ok((problem, notes))
}

/// [`simplify_partial_problem_detailed`] without the substitution notes.
pub fn simplify_partial_problem(
    cp: &ControlProblem,
    keep: &[String],
) -> Result<ControlProblem, DepGraphError> {
    simplify_partial_problem_detailed(cp, keep).map(|(p, _)| p)
}

const RED: &str = "#d62728";
const PURPLE: &str = "#9467bd";
const BLUE: &str = "#1f77b4";

/// Renders the graph as DOT. With an analysis, cyclic-core vertices and
/// in-core edges are red, extension-only vertices (and edges ending in a
/// covered vertex) purple, residual vertices (and edges ending in one) blue.
pub fn emit_dot(g: &DependencyGraph, analysis: Option<&SccAnalysis>) -> String {
    let mut out = String::from("digraph dependencies {\n  rankdir=LR;\n");
    let vertex_color: Vec<Option<&str>> = match analysis {
        None => vec![None; g.num_vertices()],
        Some(a) => {
            let in_phi: BTreeSet<&str> =
                a.phis.iter().flatten().map(|s| s.as_str()).collect();
            let covered: BTreeSet<&str> =
                a.partition.iter().flat_map(|c| c.vertices.iter().map(|v| v.as_str())).collect();
            g.plant_names()
                .iter()
                .map(|n| {
                    if in_phi.contains(n.as_str()) {
                        Some(RED)
                    } else if covered.contains(n.as_str()) {
                        Some(PURPLE)
                    } else {
                        Some(BLUE)
                    }
                })
                .collect()
        }
    };
    for (i, name) in g.plant_names().iter().enumerate() {
        match vertex_color[i] {
            Some(c) => out.push_str(&format!(
                "  \"{name}\" [color=\"{c}\", fontcolor=\"{c}\"];\n"
            )),
            None => out.push_str(&format!("  \"{name}\";\n")),
        }
    }
    let same_phi = |a: &SccAnalysis, x: &str, y: &str| {
        a.phis.iter().any(|phi| {
            phi.iter().any(|v| v == x) && phi.iter().any(|v| v == y)
        })
    };
    for e in g.edges() {
        let init = &g.plant_names()[e.init];
        let ter = &g.plant_names()[e.ter];
        let color = analysis.map(|a| {
            let covered = a.partition.iter().any(|c| c.vertices.iter().any(|v| v == ter));
            if same_phi(a, init, ter) {
                RED
            } else if covered {
                PURPLE
            } else {
                BLUE
            }
        });
        match color {
            Some(c) => out.push_str(&format!(
                "  \"{init}\" -> \"{ter}\" [label=\"{}\", color=\"{c}\", fontcolor=\"{c}\"];\n",
                e.requirement
            )),
            None => out.push_str(&format!(
                "  \"{init}\" -> \"{ter}\" [label=\"{}\"];\n",
                e.requirement
            )),
        }
    }
    out.push_str("}\n");
    out
}
