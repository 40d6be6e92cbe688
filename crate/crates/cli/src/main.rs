//! `mxsym`: detect and break local domain symmetries of finite
//! model-expansion problems, ground them to DIMACS, and solve.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mxsym_cli::{
    color_cycle, generate_pigeonhole, reorder_problem, run_pipeline_on, verify_claim, BreakMode,
    Options, PipelineError, PipelineOutput, RunReport, Stage,
};
use mxsym_core::fo::{parse_problem, print_structure};
use mxsym_core::{emit_dimacs, AtomCatalog, Domain, Problem, SolverStatus};

#[derive(Parser)]
#[command(
    name = "mxsym",
    version,
    about = "Detect and break local domain symmetries of model-expansion problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BreakArg {
    Interchange,
    Generators,
    Both,
}

#[derive(Args, Clone)]
struct Common {
    /// Domain order: a file of element names, or the word "declared".
    #[arg(long)]
    order: Option<String>,
    /// Which breaking constraints to emit.
    #[arg(long = "break", value_enum, default_value_t = BreakArg::Both)]
    break_mode: BreakArg,
    /// Compare at most this many atoms per lex constraint.
    #[arg(long)]
    lex_cap: Option<usize>,
    /// Shell out to this DIMACS solver instead of the embedded one.
    #[arg(long)]
    external_solver: Option<String>,
    /// Re-check every emitted generator by brute force when feasible.
    #[arg(long)]
    verify_oracle: bool,
    /// Write the JSON run report to this file.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent pipelines for bench.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Abort the embedded solver after this many conflicts.
    #[arg(long)]
    max_conflicts: Option<u64>,
    /// Abort the embedded solver after this many seconds.
    #[arg(long)]
    max_seconds: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Pigeons,
    ColorCycle,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the closed blocks of argument positions.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Closed blocks plus interchangeable cells and group generators.
    Detect {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Ground to DIMACS without breaking constraints.
    Ground {
        file: PathBuf,
        /// Write DIMACS here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the variable catalog as JSON.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Ground and append symmetry-breaking constraints.
    Break {
        file: PathBuf,
        /// Write DIMACS here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the variable catalog as JSON.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the whole pipeline and solve.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Time the pipeline across a generated instance family.
    Bench {
        #[arg(long, value_enum)]
        family: Family,
        /// Largest instance parameter.
        #[arg(long, default_value_t = 10)]
        max: usize,
        /// Colors for the color-cycle family.
        #[arg(long, default_value_t = 3)]
        colors: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Brute-force check of one position set and permutation.
    Verify {
        file: PathBuf,
        /// Comma-separated positions, e.g. "C|1,Color|0".
        #[arg(long)]
        positions: String,
        /// Permutation in cycle notation, e.g. "(c1 c2 c3)".
        #[arg(long)]
        perm: String,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            println!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<ExitCode, PipelineError> {
    match cmd {
        Cmd::Analyze { file, common } => {
            let out = pipeline_for(&file, Stage::Analyze, &common)?;
            emit_report(&out.report, &common)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Detect { file, common } => {
            let out = pipeline_for(&file, Stage::Detect, &common)?;
            emit_report(&out.report, &common)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Ground { file, out, catalog, common } => {
            let run = pipeline_for(&file, Stage::Ground, &common)?;
            emit_cnf(&run, out.as_deref(), catalog.as_deref(), &common)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Break { file, out, catalog, common } => {
            let run = pipeline_for(&file, Stage::Break, &common)?;
            emit_cnf(&run, out.as_deref(), catalog.as_deref(), &common)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Solve { file, common } => {
            let run = pipeline_for(&file, Stage::Solve, &common)?;
            if let Some(path) = &common.json {
                write_file(path, &run.report.to_json())?;
            }
            match run.status.expect("solve stage ran") {
                SolverStatus::Sat => {
                    println!("s SATISFIABLE");
                    if let Some(cnf) = &run.cnf {
                        if let Some(model) = solved_assignment(&run) {
                            print_model_line(&model, cnf.num_vars);
                        }
                    }
                    if let Some(structure) = &run.model {
                        let mut text = String::new();
                        print_structure(&mut text, &run.problem.vocab, structure);
                        for line in text.lines() {
                            println!("c {line}");
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                SolverStatus::Unsat => {
                    println!("s UNSATISFIABLE");
                    Ok(ExitCode::SUCCESS)
                }
                SolverStatus::BudgetExceeded => {
                    println!("s UNKNOWN");
                    Err(PipelineError {
                        stage: "solve",
                        message: "conflict or time budget exceeded before a verdict".to_string(),
                    })
                }
            }
        }
        Cmd::Bench { family, max, colors, common } => bench(family, max, colors, &common),
        Cmd::Verify { file, positions, perm, common } => {
            let source = read_source(&file)?;
            let p = parse_problem(&source)
                .map_err(|e| PipelineError { stage: "parse", message: e.to_string() })?;
            let p = apply_order(p, &common)?;
            let report = verify_claim(&p, &positions, &perm, 1 << 24)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_source(file: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(file).map_err(|e| PipelineError {
        stage: "parse",
        message: format!("cannot read {}: {e}", file.display()),
    })
}

fn apply_order(p: Problem, common: &Common) -> Result<Problem, PipelineError> {
    let Some(spec) = &common.order else { return Ok(p) };
    let order: Vec<String> = if spec == "declared" {
        let d = p.domain();
        d.elems().map(|e| d.name(e).to_string()).collect()
    } else {
        fs::read_to_string(spec)
            .map_err(|e| PipelineError {
                stage: "parse",
                message: format!("cannot read order file {spec}: {e}"),
            })?
            .split_whitespace()
            .map(str::to_string)
            .collect()
    };
    reorder_problem(&p, &order).map_err(|message| PipelineError { stage: "parse", message })
}

fn pipeline_for(
    file: &Path,
    stage: Stage,
    common: &Common,
) -> Result<PipelineOutput, PipelineError> {
    let t = Instant::now();
    let source = read_source(file)?;
    let p = parse_problem(&source)
        .map_err(|e| PipelineError { stage: "parse", message: e.to_string() })?;
    let p = apply_order(p, common)?;
    let parse_ms = t.elapsed().as_secs_f64() * 1e3;
    let name = file.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    let mut out = run_pipeline_on(p, name, stage, &options_from(common))?;
    out.report.timings.parse_ms = parse_ms;
    Ok(out)
}

fn options_from(common: &Common) -> Options {
    Options {
        break_mode: match common.break_mode {
            BreakArg::Interchange => BreakMode::Interchange,
            BreakArg::Generators => BreakMode::Generators,
            BreakArg::Both => BreakMode::Both,
        },
        lex_cap: common.lex_cap,
        verify_oracle: common.verify_oracle,
        external_solver: common.external_solver.clone(),
        max_conflicts: common.max_conflicts,
        max_seconds: common.max_seconds,
        ..Options::default()
    }
}

fn emit_report(report: &RunReport, common: &Common) -> Result<(), PipelineError> {
    let json = report.to_json();
    println!("{json}");
    if let Some(path) = &common.json {
        write_file(path, &json)?;
    }
    Ok(())
}

fn emit_cnf(
    run: &PipelineOutput,
    out: Option<&Path>,
    catalog: Option<&Path>,
    common: &Common,
) -> Result<(), PipelineError> {
    let cnf = run.cnf.as_ref().expect("grounding ran");
    let dimacs = emit_dimacs(cnf);
    match out {
        Some(path) => write_file(path, &dimacs)?,
        None => print!("{dimacs}"),
    }
    if let Some(path) = catalog {
        let cat = run.catalog.as_ref().expect("grounding ran");
        write_file(path, &catalog_json(cat, run.problem.domain()))?;
    }
    if let Some(path) = &common.json {
        write_file(path, &run.report.to_json())?;
    }
    Ok(())
}

fn catalog_json(cat: &AtomCatalog, domain: &Domain) -> String {
    let entries: Vec<serde_json::Value> = cat
        .iter()
        .map(|(v, a)| serde_json::json!({ "var": v, "atom": a.label(domain) }))
        .collect();
    serde_json::to_string_pretty(&entries).expect("catalog serializes")
}

fn write_file(path: &Path, text: &str) -> Result<(), PipelineError> {
    fs::write(path, text).map_err(|e| PipelineError {
        stage: "write",
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn solved_assignment(run: &PipelineOutput) -> Option<Vec<bool>> {
    // The embedded solver's assignment is reconstructed by re-solving;
    // cheap relative to printing and avoids carrying it in the report.
    run.cnf.as_ref().map(|c| {
        let r = mxsym_core::sat_solve(c);
        r.model.expect("re-solving a sat instance stays sat")
    })
}

fn print_model_line(model: &[bool], num_vars: u32) {
    let mut line = String::from("v");
    for v in 1..=num_vars {
        let lit = if model[v as usize - 1] { v as i64 } else { -(v as i64) };
        line.push(' ');
        line.push_str(&lit.to_string());
    }
    line.push_str(" 0");
    println!("{line}");
}

fn bench(family: Family, max: usize, colors: usize, common: &Common) -> Result<ExitCode, PipelineError> {
    let instances: Vec<(String, Problem)> = match family {
        Family::Pigeons => {
            (2..=max.max(2)).map(|n| (format!("pigeons-{n}"), generate_pigeonhole(n))).collect()
        }
        Family::ColorCycle => (3..=max.max(3))
            .map(|n| (format!("cycle-{n}x{colors}"), color_cycle(n, colors)))
            .collect(),
    };
    let opts = options_from(common);
    let results = run_many(instances, common.jobs, &opts)?;
    println!(
        "{:<14} {:>6} {:>5} {:>10} {:>10} {:>9} {:>10} {:>10} {:>7}",
        "instance", "blocks", "gens", "detect_ms", "ground_ms", "break_ms", "solve_ms", "conflicts", "status"
    );
    for report in &results {
        let gens: usize = report.blocks.iter().map(|b| b.generators.len()).sum();
        let solve = report.solve.as_ref().expect("bench solves");
        println!(
            "{:<14} {:>6} {:>5} {:>10.1} {:>10.1} {:>9.1} {:>10.1} {:>10} {:>7}",
            report.instance,
            report.blocks.len(),
            gens,
            report.timings.detection_ms(),
            report.timings.grounding_ms,
            report.timings.breaking_ms,
            report.timings.solving_ms,
            solve.conflicts,
            solve.status,
        );
    }
    if let Some(path) = &common.json {
        let json = serde_json::to_string_pretty(&results).expect("reports serialize");
        write_file(path, &json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_many(
    instances: Vec<(String, Problem)>,
    jobs: usize,
    opts: &Options,
) -> Result<Vec<RunReport>, PipelineError> {
    let n = instances.len();
    let workers = jobs.max(1).min(n.max(1));
    let work: Vec<Mutex<Option<(String, Problem)>>> =
        instances.into_iter().map(|i| Mutex::new(Some(i))).collect();
    let slots: Vec<Mutex<Option<Result<RunReport, PipelineError>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let (name, p) = work[i].lock().unwrap().take().expect("each slot taken once");
                let r = run_pipeline_on(p, &name, Stage::Solve, opts).map(|out| out.report);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every instance ran"))
        .collect()
}
