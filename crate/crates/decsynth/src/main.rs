//! Command-line front-end: parse → check → graph → reduce → synth → verify,
//! plus seeded instance generation.
//!
//! Exit codes are stable: 0 success, 1 parse/read error, 2 failed check or
//! verification, 3 reduction not applicable, 4 empty supervisor, 5 size
//! bound exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use decsynth::io::{
    emit_report, export_supervisor, parse_model, pretty_print, Diagnostic, ParseOutcome,
    ReportFormat,
};
use decsynth::{
    build_graph, check_cnms, check_rcnms, classify_plant, generate_acyclic_rcnms_instance,
    generate_cnms_instance, generate_cyclic_rcnms_instance, is_nonconflicting, sup_cn,
    verify_closed_loop, Automaton, ControlProblem, PropertyReport, SccAnalysis, SynthesisError,
    SynthesisOptions, SynthesisResult, VerificationVerdict, VerifyOptions,
};

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_NOT_APPLICABLE: u8 = 3;
const EXIT_EMPTY_SUPERVISOR: u8 = 4;
const EXIT_SIZE_BOUND: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "decsynth",
    version,
    about = "Decide from model structure whether supervisor synthesis is necessary, \
             reduce cyclic problems to minimal partial problems, and synthesize \
             modular supervisors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Limit on explored product states.
    #[arg(long, global = true, env = "DECSYNTH_BOUND", default_value_t = 10_000_000)]
    bound: usize,

    /// Zero all duration fields so identical inputs give byte-identical
    /// reports.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Progress details on stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural properties (full and relaxed) of a model.
    ///
    /// Exits 0 when the relaxed set holds, 2 otherwise.
    Check { input: PathBuf },

    /// Emit the requirement dependency graph as DOT, colored by the cycle
    /// analysis.
    Graph {
        input: PathBuf,
        /// Write the DOT text here instead of stdout.
        #[arg(long)]
        dot: Option<PathBuf>,
    },

    /// Decide whether synthesis is necessary and print the reduction plan.
    Reduce { input: PathBuf },

    /// Reduce, synthesize one supervisor per partition class, and write each
    /// as a .dcp file.
    Synth {
        input: PathBuf,
        /// Directory for supervisor files (default: alongside the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Verify supervisors against a model (an empty supervisor list checks
    /// the requirements-restricted plant itself).
    Verify {
        input: PathBuf,
        /// Supervisor .dcp files (plant blocks).
        supervisors: Vec<PathBuf>,
        /// Also compare against the exhaustive-search supremum (small
        /// instances only).
        #[arg(long)]
        maximality: bool,
    },

    /// Generate a seeded random instance and print it as .dcp text.
    Gen {
        #[command(subcommand)]
        shape: GenShape,
    },
}

#[derive(Subcommand)]
enum GenShape {
    /// Instance satisfying the full structural property set.
    Cnms {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        plants: usize,
        #[arg(long, default_value_t = 2)]
        requirements: usize,
    },
    /// Relaxed properties with an acyclic dependency graph.
    Acyclic {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        plants: usize,
        #[arg(long, default_value_t = 2)]
        requirements: usize,
    },
    /// Relaxed properties with planted dependency cycles.
    Cyclic {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        pairs: usize,
        #[arg(long, default_value_t = 2)]
        context: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Check { input } => cmd_check(&cli, input),
        Command::Graph { input, dot } => cmd_graph(&cli, input, dot.as_deref()),
        Command::Reduce { input } => cmd_reduce(&cli, input),
        Command::Synth { input, out } => cmd_synth(&cli, input, out.as_deref()),
        Command::Verify { input, supervisors, maximality } => {
            cmd_verify(&cli, input, supervisors, *maximality)
        }
        Command::Gen { shape } => cmd_gen(shape),
    };
    ExitCode::from(code)
}

/// Reads and parses a model file; on failure prints diagnostics and yields
/// the parse exit code.
fn load_model(cli: &Cli, path: &Path) -> Result<(ControlProblem, Vec<Diagnostic>), u8> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_PARSE);
        }
    };
    if cli.verbose {
        eprintln!("parsing {}", path.display());
    }
    let ParseOutcome { problem, diagnostics } = parse_model(&text);
    for d in &diagnostics {
        eprintln!("{}: {d}", path.display());
    }
    match problem {
        Some(cp) => Ok((cp, diagnostics)),
        None => {
            if cli.format == Format::Json {
                let doc = serde_json::json!({ "diagnostics": diagnostics });
                println!("{}", serde_json::to_string_pretty(&doc).expect("total"));
            }
            Err(EXIT_PARSE)
        }
    }
}

fn print_property_report(label: &str, report: &PropertyReport) {
    println!("{label}: {}", if report.satisfied { "satisfied" } else { "violated" });
    for v in &report.violations {
        println!("  - [{}] {}: {}", v.tag, v.subject, v.message);
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
}

fn cmd_check(cli: &Cli, input: &Path) -> u8 {
    let Ok((cp, diagnostics)) = load_model(cli, input) else {
        return EXIT_PARSE;
    };
    let cnms = check_cnms(&cp);
    let rcnms = check_rcnms(&cp);
    match cli.format {
        Format::Text => {
            if cli.verbose {
                for p in cp.plants() {
                    eprintln!(
                        "plant {}: {} ({} states, {} events)",
                        p.name(),
                        classify_plant(p),
                        p.num_states(),
                        p.alphabet().len()
                    );
                }
            }
            print_property_report("CNMS", &cnms);
            print_property_report("RCNMS", &rcnms);
        }
        Format::Json => {
            let doc = serde_json::json!({
                "cnms": cnms,
                "rcnms": rcnms,
                "diagnostics": diagnostics,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("total"));
        }
    }
    if rcnms.satisfied {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_graph(cli: &Cli, input: &Path, dot_path: Option<&Path>) -> u8 {
    let Ok((cp, _)) = load_model(cli, input) else {
        return EXIT_PARSE;
    };
    let graph = match build_graph(&cp) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };
    let analysis = SccAnalysis::analyze(&graph);
    let dot = decsynth::emit_dot(&graph, Some(&analysis));
    match dot_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &dot) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_PARSE;
            }
            if cli.verbose {
                eprintln!("wrote {}", path.display());
            }
        }
        None => print!("{dot}"),
    }
    EXIT_OK
}

/// Maps the planning/synthesis errors shared by reduce and synth onto exit
/// codes, printing the reason.
fn synthesis_exit(e: &SynthesisError) -> u8 {
    eprintln!("error: {e}");
    match e {
        SynthesisError::NotApplicable { report } => {
            for v in &report.violations {
                eprintln!("  - [{}] {}: {}", v.tag, v.subject, v.message);
            }
            eprintln!("note: the reduction does not apply; fall back to monolithic synthesis");
            EXIT_NOT_APPLICABLE
        }
        SynthesisError::EmptySupervisor => EXIT_EMPTY_SUPERVISOR,
        SynthesisError::SizeBound { .. } => EXIT_SIZE_BOUND,
        _ => EXIT_CHECK_FAILED,
    }
}

fn report_format(f: Format) -> ReportFormat {
    match f {
        Format::Text => ReportFormat::Text,
        Format::Json => ReportFormat::Json,
    }
}

fn cmd_reduce(cli: &Cli, input: &Path) -> u8 {
    let Ok((cp, _)) = load_model(cli, input) else {
        return EXIT_PARSE;
    };
    let plan = match decsynth::plan_reduction(&cp) {
        Ok(p) => p,
        Err(e) => return synthesis_exit(&e),
    };
    print!("{}", emit_report(&plan, &[], &[], report_format(cli.format)));
    EXIT_OK
}

fn cmd_synth(cli: &Cli, input: &Path, out: Option<&Path>) -> u8 {
    let Ok((cp, _)) = load_model(cli, input) else {
        return EXIT_PARSE;
    };
    let opts = SynthesisOptions::with_bound(cli.bound);
    let plan = match decsynth::plan_reduction(&cp) {
        Ok(p) => p,
        Err(e) => return synthesis_exit(&e),
    };

    // Same contract as execute_plan, with per-class wall-clock timing.
    let mut results: Vec<SynthesisResult> = Vec::new();
    let mut durations: Vec<f64> = Vec::new();
    for (i, part) in plan.partial_problems.iter().enumerate() {
        if cli.verbose {
            eprintln!("synthesizing {} over {{{}}}", part.name, part.vertices.join(", "));
        }
        let started = Instant::now();
        let mut result = match sup_cn(&part.problem, &opts) {
            Ok(r) => r,
            Err(e) => return synthesis_exit(&e),
        };
        durations.push(if cli.deterministic {
            0.0
        } else {
            started.elapsed().as_secs_f64() * 1e3
        });
        result.supervisor.set_name(format!("S{}", i + 1));
        results.push(result);
    }

    let out_dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| input.parent().unwrap_or(Path::new(".")).to_path_buf());
    for r in &results {
        let path = out_dir.join(format!("{}.dcp", r.supervisor.name()));
        if let Err(e) = std::fs::create_dir_all(&out_dir)
            .and_then(|_| std::fs::write(&path, export_supervisor(&r.supervisor)))
        {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_PARSE;
        }
        if cli.verbose {
            eprintln!("wrote {}", path.display());
        }
    }

    print!("{}", emit_report(&plan, &results, &durations, report_format(cli.format)));
    EXIT_OK
}

fn print_verify_text(verdict: &VerificationVerdict, nonconflicting: Option<bool>) {
    println!("safe: {}", verdict.safe);
    println!("controllable: {}", verdict.controllable);
    println!("nonblocking: {}", verdict.nonblocking);
    match verdict.maximally_permissive {
        Some(v) => println!("maximally permissive: {v}"),
        None => println!("maximally permissive: (not checked)"),
    }
    if let Some(nc) = nonconflicting {
        println!("nonconflicting: {nc}");
    }
    for w in &verdict.witnesses {
        let path = w
            .path
            .iter()
            .enumerate()
            .map(|(i, (from, e, to))| {
                if i == 0 {
                    format!("{from} -{e}-> {to}")
                } else {
                    format!(" -{e}-> {to}")
                }
            })
            .collect::<String>();
        if path.is_empty() {
            println!("witness [{}]: {}", w.property, w.message);
        } else {
            println!("witness [{}]: {path}", w.property);
            println!("  {}", w.message);
        }
    }
}

fn cmd_verify(cli: &Cli, input: &Path, supervisor_paths: &[PathBuf], maximality: bool) -> u8 {
    let Ok((cp, _)) = load_model(cli, input) else {
        return EXIT_PARSE;
    };
    let mut supervisors: Vec<Automaton> = Vec::new();
    for path in supervisor_paths {
        let Ok((sup_cp, _)) = load_model(cli, path) else {
            return EXIT_PARSE;
        };
        if !sup_cp.requirements().is_empty() {
            eprintln!(
                "error: {} contains requirement blocks; supervisor files hold plant blocks only",
                path.display()
            );
            return EXIT_PARSE;
        }
        supervisors.extend(sup_cp.plants().iter().cloned());
    }

    let opts = VerifyOptions { bound: cli.bound, check_maximality: maximality };
    let verdict = match verify_closed_loop(&cp, &supervisors, &opts) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                decsynth::OracleError::SizeBound { .. } => EXIT_SIZE_BOUND,
                _ => EXIT_CHECK_FAILED,
            };
        }
    };
    let nonconflicting = if supervisors.len() >= 2 {
        match is_nonconflicting(&supervisors, &opts) {
            Ok(nc) => Some(nc),
            Err(e) => {
                eprintln!("error: {e}");
                return match e {
                    decsynth::OracleError::SizeBound { .. } => EXIT_SIZE_BOUND,
                    _ => EXIT_CHECK_FAILED,
                };
            }
        }
    } else {
        None
    };

    match cli.format {
        Format::Text => print_verify_text(&verdict, nonconflicting),
        Format::Json => {
            let doc = serde_json::json!({
                "verdict": verdict,
                "nonconflicting": nonconflicting,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("total"));
        }
    }
    if verdict.all_hold() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_gen(shape: &GenShape) -> u8 {
    let cp = match *shape {
        GenShape::Cnms { seed, plants, requirements } => {
            generate_cnms_instance(seed, plants, requirements)
        }
        GenShape::Acyclic { seed, plants, requirements } => {
            generate_acyclic_rcnms_instance(seed, plants, requirements)
        }
        GenShape::Cyclic { seed, pairs, context } => {
            generate_cyclic_rcnms_instance(seed, pairs, context)
        }
    };
    print!("{}", pretty_print(&cp));
    EXIT_OK
}
