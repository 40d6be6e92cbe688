//! Acceptance gate: one check per shipped guarantee, one PASS or FAIL
//! line each. Run with `--nocapture` to watch the lines as they print;
//! the test fails if any criterion does.

use std::collections::BTreeSet;
use std::env;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use mxsym_cli::sample::{self, SampleLimits};
use mxsym_cli::{
    block_needs_graph, color_cycle, external, generate_pigeonhole, run_pipeline_on, BreakMode,
    Options, Stage,
};
use mxsym_core::argpos::{closed_partition, ArgPos, ArgPosSet};
use mxsym_core::autom::{find_generators, group_order_small, to_domain_permutation};
use mxsym_core::decompose::decompose;
use mxsym_core::dpg::build_dpg;
use mxsym_core::fo::{parse_problem, SymbolIo};
use mxsym_core::interchange::{bruteforce_partition, interchangeable_partition};
use mxsym_core::solve::{sat_solve_budgeted, Limits};
use mxsym_core::transform::{all_permutations, are_mx_symmetries_oracle};
use mxsym_core::{
    atom_order, break_generators, break_interchangeable, count_models, emit_dimacs, ground_theory,
    sat_solve, Cnf, Domain, DomainPermutation, InducedTransform, Problem, SolverStatus, Structure,
    Symbol, Theory, Var, Vocabulary,
};

const COLORING: &str = include_str!("data/graph_coloring.mx");
const QUEENS: &str = include_str!("data/queens5.mx");

type Criterion = (&'static str, fn() -> Result<String, String>);

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("pigeonhole scaling with complete breaking", pigeonhole_scaling),
        ("running example counts 486 then 81", running_example_counts),
        ("closed blocks preserve theory model sets", theory_symmetry_suite),
        ("fixing closed-block transforms are solution symmetries", mx_symmetry_suite),
        ("graph automorphisms match the fixing group", dpg_bijection),
        ("interchangeable subdomains match brute force", interchangeability_detection),
        ("consecutive swaps complete where star generators are not", negative_control),
        ("breaking never flips satisfiability", breaking_soundness),
        ("queens-5 has no nontrivial local symmetry", queens_no_local_symmetry),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {name}{detail}", i + 1),
            Err(e) => {
                println!("FAIL criterion {}: {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}

/// With complete interchangeability breaking every pigeonhole instance
/// up to 30 pigeons is refuted end to end in under 30 seconds, with
/// detection under 0.1 s; without breaking, 15 pigeons already exceed a
/// 60 s / 10^6-conflict budget.
fn pigeonhole_scaling() -> Result<String, String> {
    let mut worst_secs = 0.0f64;
    let mut worst_detect = 0.0f64;
    for n in 2..=30 {
        let p = generate_pigeonhole(n);
        let t = Instant::now();
        let out = run_pipeline_on(p, &format!("pigeons-{n}"), Stage::Solve, &Options::default())
            .map_err(|e| format!("pigeons-{n}: {e}"))?;
        let secs = t.elapsed().as_secs_f64();
        if out.status != Some(SolverStatus::Unsat) {
            return Err(format!("pigeons-{n} was not proven unsat"));
        }
        if secs >= 30.0 {
            return Err(format!("pigeons-{n} took {secs:.1} s, limit is 30 s"));
        }
        let detect = out.report.timings.detection_ms();
        if detect >= 100.0 {
            return Err(format!("pigeons-{n} detection took {detect:.1} ms, limit is 100 ms"));
        }
        worst_secs = worst_secs.max(secs);
        worst_detect = worst_detect.max(detect);
    }
    let p = generate_pigeonhole(15);
    let (cnf, _) = ground_theory(&p).map_err(|e| e.to_string())?;
    let limits =
        Limits { conflicts: Some(1_000_000), wall: Some(Duration::from_secs(60)) };
    let r = sat_solve_budgeted(&cnf, &limits);
    if r.status != SolverStatus::BudgetExceeded {
        return Err(format!(
            "unbroken pigeons-15 finished as {:?} inside the budget ({} conflicts)",
            r.status, r.stats.conflicts
        ));
    }
    Ok(format!(
        " (n=2..30 unsat, worst {worst_secs:.1} s, worst detection {worst_detect:.2} ms; \
         unbroken n=15 stopped at {} conflicts)",
        r.stats.conflicts
    ))
}

/// The four-cycle coloring instance has 486 solutions; one complete
/// interchangeability constraint over the color block leaves exactly
/// 486 / 3! = 81.
fn running_example_counts() -> Result<String, String> {
    let p = parse_problem(COLORING).map_err(|e| e.to_string())?;
    let (mut cnf, cat) = ground_theory(&p).map_err(|e| e.to_string())?;
    let proj: Vec<Var> = (1..=cat.len() as Var).collect();
    let total = count_models(&cnf, &proj, 1 << 12).map_err(|e| e.to_string())?;
    if total != 486 {
        return Err(format!("expected 486 colorings, counted {total}"));
    }
    let dec = decompose(&p);
    let color_slot = ArgPos::new("Color", 0);
    let block = closed_partition(&dec.problem.vocab, &dec.problem.theory)
        .into_iter()
        .find(|b| b.contains(&color_slot))
        .ok_or("no closed block holds the color output slot")?;
    let part = interchangeable_partition(&dec.problem.input, &block);
    let d = p.domain();
    let colors = part
        .blocks
        .iter()
        .find(|c| c.contains(&d.id("r").unwrap()))
        .ok_or("no interchangeable cell holds the colors")?;
    let order = atom_order(&p, &cat, &block);
    let breaking = break_interchangeable(colors, &block, &p, &order, &cat, &mut cnf, None)
        .map_err(|e| e.to_string())?;
    if !breaking.complete {
        return Err("the color-block constraint was not flagged complete".into());
    }
    let broken = count_models(&cnf, &proj, 1 << 12).map_err(|e| e.to_string())?;
    if broken != 81 {
        return Err(format!("expected 81 models after breaking, counted {broken}"));
    }
    Ok(" (486 models, 81 after one complete cell constraint)".into())
}

/// Every minimal closed block of 200 random theories induces a model
/// set symmetry for every domain permutation, checked by full
/// enumeration.
fn theory_symmetry_suite() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(31);
    let lim = SampleLimits::theory_suite();
    let mut checked = 0usize;
    for i in 0..200 {
        let p = sample::random_problem(&mut rng, &lim);
        let perms = all_permutations(p.domain().size());
        let mut ts = Vec::new();
        for block in closed_partition(&p.vocab, &p.theory) {
            for perm in &perms {
                if !perm.is_identity() {
                    ts.push(InducedTransform::new(block.clone(), perm.clone()));
                }
            }
        }
        let verdicts =
            are_mx_symmetries_oracle(&ts, &p, 1 << 14).map_err(|e| format!("theory {i}: {e}"))?;
        if let Some(k) = verdicts.iter().position(|ok| !ok) {
            return Err(format!(
                "theory {i}: {} over a closed block changed the model set",
                ts[k].perm.format_cycles(p.domain())
            ));
        }
        checked += ts.len();
    }
    Ok(format!(" (200 theories, {checked} transforms, zero violations)"))
}

/// On 200 random model-expansion instances, every closed-block
/// transform of the decomposition that fixes the input maps solutions
/// to solutions.
fn mx_symmetry_suite() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(43);
    let lim = SampleLimits::mx_suite();
    let mut checked = 0usize;
    for i in 0..200 {
        let p = sample::random_problem(&mut rng, &lim);
        let dec = decompose(&p);
        let perms = all_permutations(dec.problem.domain().size());
        let mut ts = Vec::new();
        for block in closed_partition(&dec.problem.vocab, &dec.problem.theory) {
            for perm in &perms {
                if perm.is_identity() {
                    continue;
                }
                let t = InducedTransform::new(block.clone(), perm.clone());
                if t.fixes(&dec.problem.input) {
                    ts.push(t);
                }
            }
        }
        let verdicts = are_mx_symmetries_oracle(&ts, &dec.problem, 1 << 14)
            .map_err(|e| format!("instance {i}: {e}"))?;
        if let Some(k) = verdicts.iter().position(|ok| !ok) {
            return Err(format!(
                "instance {i}: fixing transform {} is not a solution symmetry",
                ts[k].perm.format_cycles(dec.problem.domain())
            ));
        }
        checked += ts.len();
    }
    Ok(format!(" (200 instances, {checked} fixing transforms, zero violations)"))
}

/// The engine's automorphism group, restricted to domain vertices,
/// equals the brute-force set of permutations whose induced transform
/// fixes the structure; on the coloring's graph-shaped block the group
/// has order exactly 24.
fn dpg_bijection() -> Result<String, String> {
    let p = parse_problem(COLORING).map_err(|e| e.to_string())?;
    let dec = decompose(&p);
    let block = closed_partition(&dec.problem.vocab, &dec.problem.theory)
        .into_iter()
        .find(block_needs_graph)
        .ok_or("no graph-shaped block in the coloring decomposition")?;
    let order = check_group_bijection(&dec.problem.input, &block)
        .map_err(|e| format!("coloring block: {e}"))?;
    if order != 24 {
        return Err(format!("coloring block group has order {order}, expected 24"));
    }
    let mut rng = StdRng::seed_from_u64(47);
    for i in 0..50 {
        let (s, a) = sample::random_structure_with_positions(&mut rng, 2, 6);
        check_group_bijection(&s, &a).map_err(|e| format!("random structure {i}: {e}"))?;
    }
    Ok(" (coloring block order 24, 50 random structures matched element-wise)".into())
}

fn check_group_bijection(s: &Structure, a: &ArgPosSet) -> Result<u64, String> {
    let degree = s.domain().size();
    let fixing: BTreeSet<Vec<u32>> = all_permutations(degree)
        .into_iter()
        .filter(|p| InducedTransform::new(a.clone(), p.clone()).fixes(s))
        .map(|p| p.image().to_vec())
        .collect();
    let (g, m) = build_dpg(s, a);
    let aut = find_generators(&g);
    if !aut.complete {
        return Err("automorphism search was truncated".into());
    }
    let gens: Vec<Vec<u32>> = aut
        .generators
        .iter()
        .map(|gen| to_domain_permutation(gen, &m).image().to_vec())
        .collect();
    let closure = image_closure(degree, &gens, 1 << 20)?;
    if closure != fixing {
        return Err(format!(
            "engine group has {} elements, brute force found {}",
            closure.len(),
            fixing.len()
        ));
    }
    let order = group_order_small(degree, &gens, 1 << 20).map_err(|e| e.to_string())?;
    if order != fixing.len() as u64 {
        return Err(format!("group order {order} disagrees with {} fixing maps", fixing.len()));
    }
    Ok(order)
}

/// Breadth-first closure of a generator set over image arrays.
fn image_closure(
    degree: usize,
    gens: &[Vec<u32>],
    budget: usize,
) -> Result<BTreeSet<Vec<u32>>, String> {
    let id: Vec<u32> = (0..degree as u32).collect();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(p) = frontier.pop() {
        for gen in gens {
            let q: Vec<u32> = p.iter().map(|&v| gen[v as usize]).collect();
            if seen.insert(q.clone()) {
                if seen.len() > budget {
                    return Err("closure exceeded its budget".into());
                }
                frontier.push(q);
            }
        }
    }
    Ok(seen)
}

/// The coloring's color block splits the domain into exactly the
/// vertices and the colors, and on random structures the detected
/// partition equals the brute-force maximal one.
fn interchangeability_detection() -> Result<String, String> {
    let p = parse_problem(COLORING).map_err(|e| e.to_string())?;
    let dec = decompose(&p);
    let color_slot = ArgPos::new("Color", 0);
    let block = closed_partition(&dec.problem.vocab, &dec.problem.theory)
        .into_iter()
        .find(|b| b.contains(&color_slot))
        .ok_or("no closed block holds the color output slot")?;
    let part = interchangeable_partition(&dec.problem.input, &block);
    let d = dec.problem.domain();
    let names: Vec<Vec<&str>> =
        part.blocks.iter().map(|c| c.iter().map(|&e| d.name(e)).collect()).collect();
    if names != [vec!["t", "u", "v", "w"], vec!["r", "g", "b"]] {
        return Err(format!("color block cells are {names:?}"));
    }
    let mut rng = StdRng::seed_from_u64(59);
    for i in 0..100 {
        let (s, a) = sample::random_structure_with_positions(&mut rng, 2, 6);
        let fast = interchangeable_partition(&s, &a);
        let slow = bruteforce_partition(&s, &a);
        if fast.blocks != slow {
            return Err(format!("random instance {i}: partitions differ"));
        }
    }
    Ok(" (cells {t,u,v,w},{r,g,b}; 100 random partitions matched)".into())
}

/// Lex-leader constraints from the star generators (a b), (a c) leave
/// an orbit with two surviving models of a free unary predicate, while
/// the consecutive swaps (a b), (b c) keep exactly one per orbit.
fn negative_control() -> Result<String, String> {
    let domain = Domain::new(vec!["a".into(), "b".into(), "c".into()])
        .map_err(|e| e.to_string())?;
    let mut vocab = Vocabulary::new();
    vocab.declare(Symbol::pred("P", 1, SymbolIo::Output)).map_err(|e| e.to_string())?;
    let p = Problem {
        vocab,
        theory: Theory { sentences: Vec::new() },
        input: Structure::new(domain),
    };
    let (cnf, cat) = ground_theory(&p).map_err(|e| e.to_string())?;
    if cat.len() != 3 || !cnf.clauses.is_empty() {
        return Err("free predicate instance did not ground to an empty CNF".into());
    }
    let a: ArgPosSet = [ArgPos::new("P", 1)].into_iter().collect();
    let order = atom_order(&p, &cat, &a);

    let mut star_cnf = cnf.clone();
    let star =
        [DomainPermutation::transposition(3, 0, 1), DomainPermutation::transposition(3, 0, 2)];
    break_generators(&star, &a, &order, &cat, &mut star_cnf, None)
        .map_err(|e| e.to_string())?;
    let star_survivors = surviving_codes(&star_cnf, 3);

    let mut consec_cnf = cnf.clone();
    break_interchangeable(&[0, 1, 2], &a, &p, &order, &cat, &mut consec_cnf, None)
        .map_err(|e| e.to_string())?;
    let consec_survivors = surviving_codes(&consec_cnf, 3);

    // Orbits of S3 on three atoms are the popcount classes.
    let orbit = |code: &Vec<bool>| code.iter().filter(|&&b| b).count();
    let mut star_per_orbit = [0usize; 4];
    for c in &star_survivors {
        star_per_orbit[orbit(c)] += 1;
    }
    if !star_per_orbit.iter().any(|&k| k >= 2) {
        return Err(format!(
            "star generators left one survivor per orbit: {star_per_orbit:?}"
        ));
    }
    let mut consec_per_orbit = [0usize; 4];
    for c in &consec_survivors {
        consec_per_orbit[orbit(c)] += 1;
    }
    if consec_per_orbit != [1, 1, 1, 1] {
        return Err(format!(
            "consecutive swaps left {consec_per_orbit:?} survivors per orbit"
        ));
    }
    Ok(format!(
        " (star generators keep {} of 8 models, consecutive swaps keep one per orbit)",
        star_survivors.len()
    ))
}

/// Models of `cnf` projected to the first `vars` variables, by pinning
/// each assignment and solving.
fn surviving_codes(cnf: &Cnf, vars: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for bits in 0..(1u32 << vars) {
        let code: Vec<bool> = (0..vars).map(|i| bits >> i & 1 == 1).collect();
        let mut pinned = cnf.clone();
        for (i, &b) in code.iter().enumerate() {
            let v = (i + 1) as i32;
            pinned.clauses.push(vec![if b { v } else { -v }]);
        }
        if sat_solve(&pinned).status == SolverStatus::Sat {
            out.push(code);
        }
    }
    out
}

/// Breaking constraints never change satisfiability, on curated
/// instances and random ones, in every emission mode; an external
/// DIMACS solver cross-checks when one is configured.
fn breaking_soundness() -> Result<String, String> {
    let mut instances: Vec<(String, Problem)> = vec![
        ("coloring".into(), parse_problem(COLORING).map_err(|e| e.to_string())?),
        ("queens5".into(), parse_problem(QUEENS).map_err(|e| e.to_string())?),
    ];
    for n in 2..=6 {
        instances.push((format!("pigeons-{n}"), generate_pigeonhole(n)));
    }
    for n in 3..=6 {
        instances.push((format!("cycle-{n}x3"), color_cycle(n, 3)));
    }
    let mut rng = StdRng::seed_from_u64(73);
    let lim = SampleLimits::mx_suite();
    let mut kept = 0;
    while kept < 25 {
        let p = sample::random_problem(&mut rng, &lim);
        if ground_theory(&p).is_err() {
            continue;
        }
        instances.push((format!("random-{kept}"), p));
        kept += 1;
    }
    let external_cmd = env::var("MXSYM_EXTERNAL_SOLVER").ok();
    let mut cross_checked = 0usize;
    for (name, p) in &instances {
        let (base_cnf, _) = ground_theory(p).map_err(|e| format!("{name}: {e}"))?;
        let base = sat_solve(&base_cnf).status;
        for mode in [BreakMode::Interchange, BreakMode::Generators, BreakMode::Both] {
            let opts = Options { break_mode: mode, ..Options::default() };
            let out = run_pipeline_on(p.clone(), name, Stage::Break, &opts)
                .map_err(|e| format!("{name}: {e}"))?;
            let cnf = out.cnf.as_ref().expect("break stage grounds");
            let broken = sat_solve(cnf).status;
            if broken != base {
                return Err(format!(
                    "{name} with {mode:?} breaking flipped {base:?} to {broken:?}"
                ));
            }
            if let Some(cmd) = &external_cmd {
                let ext = external::solve(cmd, &emit_dimacs(cnf))
                    .map_err(|e| format!("{name}: external solver: {e}"))?;
                if ext != broken {
                    return Err(format!(
                        "{name} with {mode:?} breaking: external solver says {ext:?}, ours {broken:?}"
                    ));
                }
                cross_checked += 1;
            }
        }
    }
    let ext_note = if cross_checked > 0 {
        format!(", {cross_checked} externally cross-checked")
    } else {
        String::new()
    };
    Ok(format!(" ({} instances x 3 modes, status preserved{ext_note})", instances.len()))
}

/// The ordered-distance queens encoding admits no nontrivial local
/// symmetry: the board flips move interpretations outside every closed
/// block, so all generator lists come back empty.
fn queens_no_local_symmetry() -> Result<String, String> {
    let p = parse_problem(QUEENS).map_err(|e| e.to_string())?;
    let out = run_pipeline_on(p.clone(), "queens5", Stage::Detect, &Options::default())
        .map_err(|e| e.to_string())?;
    for b in &out.report.blocks {
        if !b.generators_complete {
            return Err(format!("block {:?} search was truncated", b.positions));
        }
        if !b.generators.is_empty() {
            return Err(format!("block {:?} has generators {:?}", b.positions, b.generators));
        }
        if !b.interchangeable.is_empty() {
            return Err(format!(
                "block {:?} has interchangeable cells {:?}",
                b.positions, b.interchangeable
            ));
        }
    }
    let solved = run_pipeline_on(p, "queens5", Stage::Solve, &Options::default())
        .map_err(|e| e.to_string())?;
    if solved.status != Some(SolverStatus::Sat) {
        return Err("queens-5 should stay satisfiable".into());
    }
    Ok(format!(" ({} blocks, all trivial, instance stays sat)", out.report.blocks.len()))
}
