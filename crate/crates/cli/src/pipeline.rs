//! Pipeline orchestration shared by the command-line front end, the
//! benches, and the acceptance tests.
//!
//! A run proceeds parse, decompose, analyze, detect, ground, break,
//! solve, stopping at the requested stage. Detection happens on the
//! decomposed problem; grounding and breaking act on the original one,
//! which is sound because output symbols are never copied.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use mxsym_core::argpos::{closed_partition, is_connectively_closed, ArgPosSet};
use mxsym_core::autom::{find_generators, to_domain_permutation};
use mxsym_core::breaker::{atom_order, break_generators, break_interchangeable};
use mxsym_core::decompose::{decompose, Decomposition};
use mxsym_core::dpg::build_dpg;
use mxsym_core::fo::{expansion_count, parse_problem, print_problem};
use mxsym_core::interchange::interchangeable_partition;
use mxsym_core::solve::{sat_solve_budgeted, Limits};
use mxsym_core::transform::{are_mx_symmetries_oracle, is_mx_symmetry_oracle};
use mxsym_core::{
    emit_dimacs, ground_theory, AtomCatalog, Cnf, Domain, DomainPermutation, ElemId,
    InducedTransform, Problem, SolverStatus, Structure,
};

use crate::external;
use crate::report::{BlockReport, CnfReport, RunReport, SolveReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BreakMode {
    Interchange,
    Generators,
    Both,
}

/// How far to run. `Ground` skips detection entirely; the other late
/// stages imply it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Analyze,
    Detect,
    Ground,
    Break,
    Solve,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub break_mode: BreakMode,
    pub lex_cap: Option<usize>,
    pub verify_oracle: bool,
    /// Expansion-space bound for the brute-force oracle.
    pub oracle_budget: u64,
    pub external_solver: Option<String>,
    pub max_conflicts: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            break_mode: BreakMode::Both,
            lex_cap: None,
            verify_oracle: false,
            oracle_budget: 1 << 20,
            external_solver: None,
            max_conflicts: None,
            max_seconds: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

impl PipelineError {
    pub fn to_json(&self) -> String {
        serde_json::json!({ "stage": self.stage, "error": self.message }).to_string()
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for PipelineError {}

fn err(stage: &'static str, e: impl fmt::Display) -> PipelineError {
    PipelineError { stage, message: e.to_string() }
}

/// Detection results for one closed block, kept in pipeline form so
/// callers can re-break or re-verify without re-detecting.
#[derive(Clone, Debug)]
pub struct BlockData {
    pub positions: ArgPosSet,
    pub partition: Vec<Vec<ElemId>>,
    pub generators: Vec<DomainPermutation>,
    pub needs_graph: bool,
}

pub struct PipelineOutput {
    pub report: RunReport,
    pub problem: Problem,
    pub decomposition: Option<Decomposition>,
    pub blocks: Vec<BlockData>,
    pub cnf: Option<Cnf>,
    pub catalog: Option<AtomCatalog>,
    pub status: Option<SolverStatus>,
    pub model: Option<Structure>,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// The permutation graph pays off only when a symbol holds two or more
/// positions in the block; otherwise the interchangeable cells already
/// generate the whole input-fixing group.
pub fn block_needs_graph(a: &ArgPosSet) -> bool {
    let mut last: Option<&str> = None;
    for pos in a {
        if last == Some(pos.symbol.as_str()) {
            return true;
        }
        last = Some(&pos.symbol);
    }
    false
}

pub fn run_pipeline(
    source: &str,
    name: &str,
    upto: Stage,
    opts: &Options,
) -> Result<PipelineOutput, PipelineError> {
    let t = Instant::now();
    let p = parse_problem(source).map_err(|e| err("parse", e))?;
    let parse_ms = ms(t);
    let mut out = run_pipeline_on(p, name, upto, opts)?;
    out.report.timings.parse_ms = parse_ms;
    Ok(out)
}

pub fn run_pipeline_on(
    p: Problem,
    name: &str,
    upto: Stage,
    opts: &Options,
) -> Result<PipelineOutput, PipelineError> {
    let mut report = RunReport::new(name);
    let wants_detect = !matches!(upto, Stage::Ground);
    let detect_fully = !matches!(upto, Stage::Analyze | Stage::Ground);
    let wants_ground = matches!(upto, Stage::Ground | Stage::Break | Stage::Solve);
    let wants_break = matches!(upto, Stage::Break | Stage::Solve);
    let wants_solve = upto == Stage::Solve;

    let mut decomposition = None;
    let mut blocks: Vec<BlockData> = Vec::new();
    if wants_detect {
        let t = Instant::now();
        let dec = decompose(&p);
        report.timings.decompose_ms = ms(t);
        let t = Instant::now();
        let closed = closed_partition(&dec.problem.vocab, &dec.problem.theory);
        report.timings.analyze_ms = ms(t);
        let domain = dec.problem.domain().clone();
        for positions in closed {
            let needs_graph = block_needs_graph(&positions);
            let mut data = BlockData {
                positions,
                partition: Vec::new(),
                generators: Vec::new(),
                needs_graph,
            };
            let mut rep = BlockReport {
                positions: data.positions.iter().map(|p| p.to_string()).collect(),
                needs_graph,
                interchangeable: Vec::new(),
                generators: Vec::new(),
                generators_complete: true,
                oracle_checked: None,
            };
            if detect_fully {
                let t = Instant::now();
                let part = interchangeable_partition(&dec.problem.input, &data.positions);
                report.timings.interchange_ms += ms(t);
                data.partition = part.blocks;
                rep.interchangeable = data
                    .partition
                    .iter()
                    .filter(|c| c.len() >= 2)
                    .map(|c| c.iter().map(|&e| domain.name(e).to_string()).collect())
                    .collect();
                if needs_graph {
                    let t = Instant::now();
                    let (g, m) = build_dpg(&dec.problem.input, &data.positions);
                    report.timings.dpg_ms += ms(t);
                    let t = Instant::now();
                    let aut = find_generators(&g);
                    report.timings.autom_ms += ms(t);
                    rep.generators_complete = aut.complete;
                    let mut seen = BTreeSet::new();
                    for gen in &aut.generators {
                        let dp = to_domain_permutation(gen, &m);
                        if !dp.is_identity() && seen.insert(dp.image().to_vec()) {
                            data.generators.push(dp);
                        }
                    }
                } else {
                    for cell in data.partition.iter().filter(|c| c.len() >= 2) {
                        for pair in cell.windows(2) {
                            data.generators.push(DomainPermutation::transposition(
                                domain.size(),
                                pair[0],
                                pair[1],
                            ));
                        }
                    }
                }
                rep.generators =
                    data.generators.iter().map(|g| g.format_cycles(&domain)).collect();
            }
            report.blocks.push(rep);
            blocks.push(data);
        }
        if detect_fully && opts.verify_oracle {
            verify_blocks(&dec, &blocks, &mut report.blocks, opts.oracle_budget)
                .map_err(|message| PipelineError { stage: "detect", message })?;
        }
        if matches!(upto, Stage::Analyze | Stage::Detect) {
            report.decomposition = Some(print_problem(&dec.problem));
        }
        decomposition = Some(dec);
    }

    let mut cnf = None;
    let mut catalog = None;
    if wants_ground {
        let t = Instant::now();
        let (c, cat) = ground_theory(&p).map_err(|e| err("ground", e))?;
        report.timings.grounding_ms = ms(t);
        report.cnf = Some(CnfReport {
            catalog_atoms: cat.len(),
            vars: c.num_vars,
            clauses: c.clauses.len(),
            breaking_clauses: 0,
        });
        cnf = Some(c);
        catalog = Some(cat);
    }

    if wants_break {
        let c = cnf.as_mut().expect("breaking follows grounding");
        let cat = catalog.as_ref().expect("breaking follows grounding");
        let before = c.clauses.len();
        let t = Instant::now();
        for data in &blocks {
            let order = atom_order(&p, cat, &data.positions);
            if order.is_empty() {
                continue;
            }
            if matches!(opts.break_mode, BreakMode::Interchange | BreakMode::Both) {
                for delta in data.partition.iter().filter(|c| c.len() >= 2) {
                    break_interchangeable(
                        delta,
                        &data.positions,
                        &p,
                        &order,
                        cat,
                        c,
                        opts.lex_cap,
                    )
                    .map_err(|e| err("break", e))?;
                }
            }
            // In `Both` mode a graphless block would emit its cell
            // transpositions twice, so the generator pass skips it.
            let emit_generators = match opts.break_mode {
                BreakMode::Generators => true,
                BreakMode::Both => data.needs_graph,
                BreakMode::Interchange => false,
            };
            if emit_generators {
                break_generators(&data.generators, &data.positions, &order, cat, c, opts.lex_cap)
                    .map_err(|e| err("break", e))?;
            }
        }
        report.timings.breaking_ms = ms(t);
        if let Some(r) = report.cnf.as_mut() {
            r.breaking_clauses = c.clauses.len() - before;
            r.vars = c.num_vars;
            r.clauses = c.clauses.len();
        }
    }

    let mut status = None;
    let mut model = None;
    if wants_solve {
        let c = cnf.as_ref().expect("solving follows grounding");
        let t = Instant::now();
        if let Some(cmd) = &opts.external_solver {
            let st = external::solve(cmd, &emit_dimacs(c))
                .map_err(|message| PipelineError { stage: "solve", message })?;
            report.solve = Some(SolveReport {
                status: status_name(st).to_string(),
                engine: cmd.clone(),
                decisions: 0,
                conflicts: 0,
                propagations: 0,
                restarts: 0,
            });
            status = Some(st);
        } else {
            let limits = Limits {
                conflicts: opts.max_conflicts,
                wall: opts.max_seconds.map(Duration::from_secs_f64),
            };
            let r = sat_solve_budgeted(c, &limits);
            report.solve = Some(SolveReport {
                status: status_name(r.status).to_string(),
                engine: "embedded".to_string(),
                decisions: r.stats.decisions,
                conflicts: r.stats.conflicts,
                propagations: r.stats.propagations,
                restarts: r.stats.restarts,
            });
            if r.status == SolverStatus::Sat {
                let assignment = r.model.as_ref().expect("sat results carry a model");
                let out = catalog
                    .as_ref()
                    .expect("solving follows grounding")
                    .decode(&p, assignment)
                    .map_err(|e| err("solve", e))?;
                model = Some(out);
            }
            status = Some(r.status);
        }
        report.timings.solving_ms = ms(t);
    }

    Ok(PipelineOutput {
        report,
        problem: p,
        decomposition,
        blocks,
        cnf,
        catalog,
        status,
        model,
    })
}

pub fn status_name(s: SolverStatus) -> &'static str {
    match s {
        SolverStatus::Sat => "sat",
        SolverStatus::Unsat => "unsat",
        SolverStatus::BudgetExceeded => "budget",
    }
}

/// Brute-force check of every emitted generator against the decomposed
/// problem, sharing one enumeration sweep across all blocks. Skipped
/// without a verdict when the expansion space is over the budget.
fn verify_blocks(
    dec: &Decomposition,
    blocks: &[BlockData],
    reps: &mut [BlockReport],
    budget: u64,
) -> Result<(), String> {
    if expansion_count(&dec.problem) > budget as u128 {
        return Ok(());
    }
    let domain = dec.problem.domain();
    let mut ts = Vec::new();
    let mut owner = Vec::new();
    for (i, data) in blocks.iter().enumerate() {
        for g in &data.generators {
            let t = InducedTransform::new(data.positions.clone(), g.clone());
            if !t.fixes(&dec.problem.input) {
                return Err(format!(
                    "generator {} does not fix the input structure",
                    g.format_cycles(domain)
                ));
            }
            ts.push(t);
            owner.push(i);
        }
    }
    let Ok(verdicts) = are_mx_symmetries_oracle(&ts, &dec.problem, budget) else {
        return Ok(());
    };
    for (k, ok) in verdicts.iter().enumerate() {
        if !ok {
            return Err(format!(
                "generator {} of block {} failed the brute-force symmetry check",
                ts[k].perm.format_cycles(domain),
                reps[owner[k]].positions.join(",")
            ));
        }
    }
    for rep in reps.iter_mut() {
        rep.oracle_checked = Some(true);
    }
    Ok(())
}

/// Rebuild a problem with the same elements ranked by `order`.
pub fn reorder_problem(p: &Problem, order: &[String]) -> Result<Problem, String> {
    let d = p.domain();
    let names: Vec<String> = d.elems().map(|e| d.name(e).to_string()).collect();
    let reordered = Domain::with_order(names, order).map_err(|e| e.to_string())?;
    let mut input = Structure::new(reordered);
    for (name, rel) in p.input.rels() {
        input.set_rel(name, rel.clone()).map_err(|e| e.to_string())?;
    }
    for (name, graph) in p.input.funcs() {
        input.set_func(name, graph.clone()).map_err(|e| e.to_string())?;
    }
    Ok(Problem { vocab: p.vocab.clone(), theory: p.theory.clone(), input })
}

/// Brute-force re-check of a user-supplied position set and permutation.
/// Position names containing `#` refer to occurrence copies, so the
/// claim is checked against the decomposed problem; plain names are
/// checked against the problem as given.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub positions: Vec<String>,
    pub perm: String,
    pub decomposed: bool,
    pub connectively_closed: bool,
    pub fixes_input: bool,
    pub is_symmetry: bool,
}

pub fn verify_claim(
    p: &Problem,
    positions: &str,
    cycles: &str,
    budget: u64,
) -> Result<VerifyReport, PipelineError> {
    let mut set = ArgPosSet::new();
    for part in positions.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let pos = mxsym_core::ArgPos::parse(part)
            .ok_or_else(|| err("verify", format!("bad position `{part}`, expected Sym|i")))?;
        set.insert(pos);
    }
    if set.is_empty() {
        return Err(err("verify", "no argument positions given"));
    }
    let decomposed = set.iter().any(|pos| pos.symbol.contains('#'));
    let dec;
    let p = if decomposed {
        dec = decompose(p);
        &dec.problem
    } else {
        p
    };
    let perm =
        DomainPermutation::parse_cycles(p.domain(), cycles).map_err(|e| err("verify", e))?;
    let t = InducedTransform::new(set.clone(), perm.clone());
    let is_symmetry = is_mx_symmetry_oracle(&t, p, budget)
        .map_err(|e| err("verify", format!("instance too large for brute force: {e}")))?;
    Ok(VerifyReport {
        positions: set.iter().map(|p| p.to_string()).collect(),
        perm: perm.format_cycles(p.domain()),
        decomposed,
        connectively_closed: is_connectively_closed(&set, &p.theory),
        fixes_input: t.fixes(&p.input),
        is_symmetry,
    })
}
