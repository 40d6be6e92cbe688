//! CDCL SAT solving and exhaustive projected model counting.
//!
//! The solver is deliberately small: two-watched-literal propagation,
//! first-UIP conflict analysis, luby restarts, phase saving, activity
//! decision order with lowest-index tie breaking, and activity-based
//! reduction of the learned clause store. Everything is deterministic,
//! so identical inputs give identical statistics. The model counter
//! re-solves with blocking clauses over the projection variables and
//! is meant as an oracle, not as a competitive counter.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::ground::{lit_var, Cnf, Lit, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverStatus {
    Sat,
    Unsat,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub wall: Duration,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub status: SolverStatus,
    /// Full assignment indexed by variable minus one; present iff Sat.
    pub model: Option<Vec<bool>>,
    pub stats: SolverStats,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    pub conflicts: Option<u64>,
    pub wall: Option<Duration>,
}

impl Limits {
    pub fn none() -> Limits {
        Limits::default()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("model count budget exhausted")]
    CountBudget,
    #[error("solver budget exhausted while counting")]
    SolverBudget,
}

pub fn sat_solve(c: &Cnf) -> SolverResult {
    sat_solve_budgeted(c, &Limits::none())
}

pub fn sat_solve_budgeted(c: &Cnf, limits: &Limits) -> SolverResult {
    Solver::new(c, *limits).run()
}

/// Number of assignments to `projection` extensible to a model,
/// counted by enumeration with blocking clauses. `max_models` bounds
/// the enumeration, not the per-call solver effort.
pub fn count_models(c: &Cnf, projection: &[Var], max_models: u64) -> Result<u64, SolveError> {
    let mut work = c.clone();
    let mut count = 0u64;
    loop {
        let r = sat_solve(&work);
        match r.status {
            SolverStatus::Unsat => return Ok(count),
            SolverStatus::BudgetExceeded => return Err(SolveError::SolverBudget),
            SolverStatus::Sat => {
                count += 1;
                if count > max_models {
                    return Err(SolveError::CountBudget);
                }
                let model = r.model.unwrap();
                let blocking: Vec<Lit> = projection
                    .iter()
                    .map(|&v| if model[v as usize - 1] { -(v as Lit) } else { v as Lit })
                    .collect();
                work.add_clause(blocking);
            }
        }
    }
}

/// Literal packed as `2 * var + sign`, variables 0-based internally.
type ILit = u32;

fn ilit(l: Lit) -> ILit {
    ((lit_var(l) - 1) << 1) | (l < 0) as ILit
}

fn ivar(l: ILit) -> usize {
    (l >> 1) as usize
}

fn flip(l: ILit) -> ILit {
    l ^ 1
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum LVal {
    Undef,
    True,
    False,
}

struct Clause {
    lits: Vec<ILit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

type CRef = usize;

struct Solver {
    clauses: Vec<Clause>,
    learnt_refs: Vec<CRef>,
    watches: Vec<Vec<CRef>>,
    assigns: Vec<i8>,
    polarity: Vec<bool>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    trail: Vec<ILit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    heap: VarHeap,
    var_act: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    max_learnts: f64,
    limits: Limits,
    stats: SolverStats,
    start: Instant,
    unsat_at_load: bool,
    seen: Vec<bool>,
}

const VAR_DECAY: f64 = 0.95;
const CLA_DECAY: f64 = 0.999;
const RESTART_BASE: u64 = 128;

impl Solver {
    fn new(c: &Cnf, limits: Limits) -> Solver {
        let n = c.num_vars as usize;
        let mut s = Solver {
            clauses: Vec::with_capacity(c.clauses.len()),
            learnt_refs: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![0; n],
            polarity: vec![false; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            heap: VarHeap::new(n),
            var_act: vec![0.0; n],
            var_inc: 1.0,
            cla_inc: 1.0,
            max_learnts: (c.clauses.len() as f64 / 3.0).max(1000.0),
            limits,
            stats: SolverStats::default(),
            start: Instant::now(),
            unsat_at_load: false,
            seen: vec![false; n],
        };
        for v in 0..n as u32 {
            s.heap.insert(v, &s.var_act);
        }
        for clause in &c.clauses {
            if s.unsat_at_load {
                break;
            }
            s.load(clause);
        }
        s
    }

    /// Dedups and drops tautologies so every stored clause has two
    /// distinct watchable literals.
    fn load(&mut self, clause: &[Lit]) {
        let mut lits: Vec<ILit> = clause.iter().map(|&l| ilit(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[1] == flip(w[0])) {
            return;
        }
        match lits.len() {
            0 => self.unsat_at_load = true,
            1 => match self.lit_value(lits[0]) {
                LVal::True => {}
                LVal::False => self.unsat_at_load = true,
                LVal::Undef => self.enqueue(lits[0], None),
            },
            _ => {
                let cref = self.clauses.len();
                self.attach(cref, lits[0], lits[1]);
                self.clauses.push(Clause { lits, learnt: false, deleted: false, activity: 0.0 });
            }
        }
    }

    fn attach(&mut self, cref: CRef, w0: ILit, w1: ILit) {
        self.watches[flip(w0) as usize].push(cref);
        self.watches[flip(w1) as usize].push(cref);
    }

    fn lit_value(&self, l: ILit) -> LVal {
        match self.assigns[ivar(l)] {
            0 => LVal::Undef,
            a => {
                if (a > 0) == (l & 1 == 0) {
                    LVal::True
                } else {
                    LVal::False
                }
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: ILit, from: Option<CRef>) {
        debug_assert!(self.lit_value(l) == LVal::Undef);
        let v = ivar(l);
        self.assigns[v] = if l & 1 == 0 { 1 } else { -1 };
        self.level[v] = self.decision_level();
        self.reason[v] = from;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<CRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let ws = std::mem::take(&mut self.watches[p as usize]);
            let mut kept = Vec::with_capacity(ws.len());
            let mut conflict = None;
            for (i, &cref) in ws.iter().enumerate() {
                if self.clauses[cref].deleted {
                    continue;
                }
                let false_lit = flip(p);
                let c = &mut self.clauses[cref];
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                debug_assert_eq!(c.lits[1], false_lit);
                let first = c.lits[0];
                if self.lit_value(first) == LVal::True {
                    kept.push(cref);
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cref].lits.len() {
                    if self.lit_value(self.clauses[cref].lits[k]) != LVal::False {
                        self.clauses[cref].lits.swap(1, k);
                        let new_watch = flip(self.clauses[cref].lits[1]);
                        self.watches[new_watch as usize].push(cref);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                kept.push(cref);
                if self.lit_value(first) == LVal::False {
                    kept.extend_from_slice(&ws[i + 1..]);
                    self.qhead = self.trail.len();
                    conflict = Some(cref);
                    break;
                }
                self.enqueue(first, Some(cref));
            }
            self.watches[p as usize] = kept;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn analyze(&mut self, mut confl: CRef) -> (Vec<ILit>, u32) {
        let mut learnt: Vec<ILit> = vec![0];
        let mut counter = 0usize;
        let mut index = self.trail.len();
        let mut p: Option<ILit> = None;
        loop {
            self.bump_clause(confl);
            let lits = std::mem::take(&mut self.clauses[confl].lits);
            for &q in lits.iter().skip(if p.is_some() { 1 } else { 0 }) {
                let v = ivar(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            self.clauses[confl].lits = lits;
            loop {
                index -= 1;
                if self.seen[ivar(self.trail[index])] {
                    break;
                }
            }
            let uip = self.trail[index];
            self.seen[ivar(uip)] = false;
            counter -= 1;
            if counter == 0 {
                learnt[0] = flip(uip);
                break;
            }
            p = Some(uip);
            confl = self.reason[ivar(uip)].expect("intermediate UIP candidates are propagated");
        }
        for &q in &learnt[1..] {
            self.seen[ivar(q)] = false;
        }
        let blevel = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[ivar(learnt[i])] > self.level[ivar(learnt[max_i])] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[ivar(learnt[1])]
        };
        (learnt, blevel)
    }

    fn backtrack(&mut self, to: u32) {
        if self.decision_level() <= to {
            return;
        }
        let bound = self.trail_lim[to as usize];
        for i in (bound..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = ivar(l);
            self.polarity[v] = self.assigns[v] > 0;
            self.assigns[v] = 0;
            self.reason[v] = None;
            self.heap.insert(v as u32, &self.var_act);
        }
        self.trail.truncate(bound);
        self.trail_lim.truncate(to as usize);
        self.qhead = bound;
    }

    fn bump_var(&mut self, v: usize) {
        self.var_act[v] += self.var_inc;
        if self.var_act[v] > 1e100 {
            for a in &mut self.var_act {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.restore(v as u32, &self.var_act);
    }

    fn bump_clause(&mut self, cref: CRef) {
        if !self.clauses[cref].learnt {
            return;
        }
        self.clauses[cref].activity += self.cla_inc;
        if self.clauses[cref].activity > 1e20 {
            for &r in &self.learnt_refs {
                self.clauses[r].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn locked(&self, cref: CRef) -> bool {
        let c0 = self.clauses[cref].lits[0];
        self.reason[ivar(c0)] == Some(cref) && self.lit_value(c0) == LVal::True
    }

    /// Drops the less active half of the learned clauses, keeping
    /// reasons and binary clauses. Watches are purged lazily.
    fn reduce_db(&mut self) {
        let mut live: Vec<CRef> = self
            .learnt_refs
            .iter()
            .copied()
            .filter(|&r| !self.clauses[r].deleted)
            .collect();
        live.sort_by(|&a, &b| {
            self.clauses[a].activity.partial_cmp(&self.clauses[b].activity).unwrap()
        });
        let half = live.len() / 2;
        for &r in &live[..half] {
            if self.clauses[r].lits.len() > 2 && !self.locked(r) {
                self.clauses[r].deleted = true;
            }
        }
        self.learnt_refs = live.into_iter().filter(|&r| !self.clauses[r].deleted).collect();
        self.max_learnts *= 1.2;
    }

    fn out_of_budget(&self) -> bool {
        if let Some(max) = self.limits.conflicts {
            if self.stats.conflicts >= max {
                return true;
            }
        }
        if let Some(max) = self.limits.wall {
            if self.stats.conflicts % 1024 == 0 && self.start.elapsed() >= max {
                return true;
            }
        }
        false
    }

    fn run(mut self) -> SolverResult {
        let status = self.search();
        let model = if status == SolverStatus::Sat {
            Some(self.assigns.iter().map(|&a| a > 0).collect())
        } else {
            None
        };
        self.stats.wall = self.start.elapsed();
        SolverResult { status, model, stats: self.stats }
    }

    fn search(&mut self) -> SolverStatus {
        if self.unsat_at_load {
            return SolverStatus::Unsat;
        }
        let mut conflicts_here = 0u64;
        let mut restart_limit = RESTART_BASE * luby2(self.stats.restarts);
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    return SolverStatus::Unsat;
                }
                let (learnt, blevel) = self.analyze(confl);
                self.backtrack(blevel);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let cref = self.clauses.len();
                    self.attach(cref, learnt[0], learnt[1]);
                    let first = learnt[0];
                    self.clauses.push(Clause {
                        lits: learnt,
                        learnt: true,
                        deleted: false,
                        activity: self.cla_inc,
                    });
                    self.learnt_refs.push(cref);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLA_DECAY;
                if self.out_of_budget() {
                    return SolverStatus::BudgetExceeded;
                }
            } else {
                if conflicts_here >= restart_limit {
                    self.backtrack(0);
                    self.stats.restarts += 1;
                    conflicts_here = 0;
                    restart_limit = RESTART_BASE * luby2(self.stats.restarts);
                }
                if self.learnt_refs.len() as f64 > self.max_learnts {
                    self.reduce_db();
                }
                let v = loop {
                    match self.heap.pop(&self.var_act) {
                        None => return SolverStatus::Sat,
                        Some(v) if self.assigns[v as usize] == 0 => break v,
                        Some(_) => {}
                    }
                };
                self.stats.decisions += 1;
                self.trail_lim.push(self.trail.len());
                let l = (v << 1) | !self.polarity[v as usize] as u32;
                self.enqueue(l, None);
            }
        }
    }
}

/// Luby sequence with base 2: 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
fn luby2(i: u64) -> u64 {
    let mut x = i;
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) / 2;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

/// Binary max-heap over variables ordered by activity, ties to the
/// lower index. `pos` is `usize::MAX` for variables not in the heap.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

impl VarHeap {
    fn new(n: usize) -> VarHeap {
        VarHeap { heap: Vec::with_capacity(n), pos: vec![usize::MAX; n] }
    }

    fn before(a: u32, b: u32, act: &[f64]) -> bool {
        let (aa, ab) = (act[a as usize], act[b as usize]);
        aa > ab || (aa == ab && a < b)
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.pos[v as usize] != usize::MAX {
            return;
        }
        self.pos[v as usize] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    /// Re-establishes order after v's activity grew.
    fn restore(&mut self, v: u32, act: &[f64]) {
        let i = self.pos[v as usize];
        if i != usize::MAX {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = usize::MAX;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::before(self.heap[i], self.heap[parent], act) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let mut best = i;
            for child in [2 * i + 1, 2 * i + 2] {
                if child < self.heap.len() && Self::before(self.heap[child], self.heap[best], act)
                {
                    best = child;
                }
            }
            if best == i {
                return;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i;
        self.pos[self.heap[j] as usize] = j;
    }
}
