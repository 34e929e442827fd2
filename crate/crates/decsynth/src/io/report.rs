//! Report rendering for reduction plans and synthesis results: a compact
//! text table (model, uncontrolled size, controlled size, duration) or a
//! stable JSON document with the verdict, per-partial statistics, and the
//! property-check rationale.

use serde::Serialize;

use crate::synthesis::{Rationale, ReductionPlan, SynthesisResult, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    pub name: String,
    pub vertices: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionSummary {
    pub plants_total: usize,
    pub plants_retained: usize,
    /// Share of plants the reduction removes from synthesis, in percent.
    pub percent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisRow {
    pub name: String,
    pub uncontrolled: usize,
    pub controlled: usize,
    pub removed_transitions: usize,
    pub iterations: usize,
    pub duration_ms: f64,
}

/// The complete machine-readable report; the JSON format serializes this
/// struct as-is.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub classes: Vec<ClassSummary>,
    pub residual: Vec<String>,
    pub reduction: ReductionSummary,
    pub results: Vec<SynthesisRow>,
    pub rationale: Rationale,
}

impl RunReport {
    /// Pairs a plan with synthesis results. `durations_ms` lines up with
    /// `results`; missing entries count as zero (used by deterministic
    /// output modes).
    pub fn new(plan: &ReductionPlan, results: &[SynthesisResult], durations_ms: &[f64]) -> Self {
        let classes: Vec<ClassSummary> = plan
            .partial_problems
            .iter()
            .map(|p| ClassSummary {
                name: p.name.clone(),
                vertices: p.vertices.clone(),
                notes: p.notes.clone(),
            })
            .collect();
        let plants_retained: usize = classes.iter().map(|c| c.vertices.len()).sum();
        let plants_total = plants_retained + plan.residual.len();
        let percent = if plants_total == 0 {
            0.0
        } else {
            100.0 * (1.0 - plants_retained as f64 / plants_total as f64)
        };
        let results: Vec<SynthesisRow> = results
            .iter()
            .enumerate()
            .map(|(i, r)| SynthesisRow {
                name: r.supervisor.name().to_string(),
                uncontrolled: r.uncontrolled_size,
                controlled: r.controlled_size,
                removed_transitions: r.removed_transitions.len(),
                iterations: r.iterations,
                duration_ms: durations_ms.get(i).copied().unwrap_or(0.0),
            })
            .collect();
        RunReport {
            verdict: plan.verdict,
            classes,
            residual: plan.residual.clone(),
            reduction: ReductionSummary { plants_total, plants_retained, percent },
            results,
            rationale: plan.rationale.clone(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("verdict: {}\n", self.verdict));
        if self.classes.is_empty() {
            out.push_str("classes: (none)\n");
        } else {
            out.push_str("classes:\n");
            for c in &self.classes {
                out.push_str(&format!("  {}: {}\n", c.name, c.vertices.join(" ")));
                for note in &c.notes {
                    out.push_str(&format!("    note: {note}\n"));
                }
            }
        }
        if self.residual.is_empty() {
            out.push_str("residual: (none)\n");
        } else {
            out.push_str(&format!("residual: {}\n", self.residual.join(" ")));
        }
        out.push_str(&format!(
            "plants retained for synthesis: {} of {} (reduction {:.0}%)\n",
            self.reduction.plants_retained, self.reduction.plants_total, self.reduction.percent
        ));
        out.push('\n');

        let name_width = self
            .results
            .iter()
            .map(|r| r.name.len())
            .chain(["model".len()])
            .max()
            .expect("chain is non-empty");
        out.push_str(&format!(
            "{:<name_width$} | {:>12} | {:>10} | {:>13}\n",
            "model", "uncontrolled", "controlled", "duration [ms]"
        ));
        out.push_str(&format!(
            "{:-<name_width$}-+-{:->12}-+-{:->10}-+-{:->13}\n",
            "", "", "", ""
        ));
        if self.results.is_empty() {
            if self.verdict == Verdict::Sectionalize {
                out.push_str("synthesis pending (run synth to produce supervisors)\n");
            } else {
                out.push_str("no synthesis necessary\n");
            }
        } else {
            for r in &self.results {
                out.push_str(&format!(
                    "{:<name_width$} | {:>12} | {:>10} | {:>13.3}\n",
                    r.name, r.uncontrolled, r.controlled, r.duration_ms
                ));
            }
        }
        out
    }
}

/// Renders a reduction plan plus synthesis results. Text output is the
/// human-readable table; JSON output is the serialized [`RunReport`].
pub fn emit_report(
    plan: &ReductionPlan,
    results: &[SynthesisResult],
    durations_ms: &[f64],
    format: ReportFormat,
) -> String {
    let report = RunReport::new(plan, results, durations_ms);
    match format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(&report).expect("report serialization is total");
            s.push('\n');
            s
        }
    }
}
