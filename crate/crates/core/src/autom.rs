//! Colored-graph automorphism search.
//!
//! Equitable color refinement plus individualization-refinement
//! backtracking, the standard recipe: refine the coloring until stable,
//! individualize one vertex of the first smallest non-singleton cell,
//! recurse, and read candidate automorphisms off pairs of discrete leaves.
//! Everything the search emits is re-verified by an independent edge and
//! color check, so the search strategy itself never has to be trusted.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dpg::{ColoredGraph, DpgMapping};
use crate::dset::UnionFind;
use crate::transform::DomainPermutation;

pub const NODE_BUDGET_DEFAULT: u64 = 1 << 20;
pub const CLOSURE_BUDGET_DEFAULT: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("group closure exceeded {0} elements")]
pub struct ClosureBudget(pub usize);

/// An ordered partition of the vertices. Cell order is significant:
/// refinement and individualization keep it deterministic, which makes the
/// whole search reproducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPartition {
    cells: Vec<Vec<u32>>,
    cell_of: Vec<u32>,
}

impl OrderedPartition {
    /// Initial partition: one cell per graph color, cells by ascending
    /// color, vertices ascending within each cell.
    pub fn from_colors(g: &ColoredGraph) -> OrderedPartition {
        let mut by_color: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for v in 0..g.n() as u32 {
            by_color.entry(g.color(v)).or_default().push(v);
        }
        let mut p = OrderedPartition { cells: by_color.into_values().collect(), cell_of: Vec::new() };
        p.rebuild_cell_of(g.n());
        p
    }

    fn rebuild_cell_of(&mut self, n: usize) {
        self.cell_of = vec![0; n];
        for (ci, cell) in self.cells.iter().enumerate() {
            for &v in cell {
                self.cell_of[v as usize] = ci as u32;
            }
        }
    }

    pub fn cells(&self) -> &[Vec<u32>] {
        &self.cells
    }

    pub fn cell_of(&self, v: u32) -> u32 {
        self.cell_of[v as usize]
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 1)
    }

    /// Cell sizes in order; equal shapes are a necessary condition for two
    /// search paths to be related by an automorphism.
    pub fn shape(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    /// The vertex sequence of a discrete partition.
    pub fn sequence(&self) -> Vec<u32> {
        debug_assert!(self.is_discrete());
        self.cells.iter().map(|c| c[0]).collect()
    }

    /// Splits `v` out of its cell, putting the singleton first.
    pub fn individualize(&self, v: u32) -> OrderedPartition {
        let ci = self.cell_of(v) as usize;
        let mut cells = Vec::with_capacity(self.cells.len() + 1);
        for (i, cell) in self.cells.iter().enumerate() {
            if i == ci {
                cells.push(vec![v]);
                cells.push(cell.iter().copied().filter(|&w| w != v).collect());
            } else {
                cells.push(cell.clone());
            }
        }
        let mut p = OrderedPartition { cells, cell_of: Vec::new() };
        p.rebuild_cell_of(self.cell_of.len());
        p
    }

    /// Index of the first smallest cell with at least two vertices.
    fn target_cell(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, cell) in self.cells.iter().enumerate() {
            if cell.len() >= 2 && best.map_or(true, |b| cell.len() < self.cells[b].len()) {
                best = Some(i);
            }
        }
        best
    }
}

/// Coarsest equitable refinement of `p`: splits cells by neighbor counts
/// into each cell until any two vertices sharing a cell agree on their
/// counts into every cell. Sub-cells replace their cell in ascending count
/// order, so the result depends only on `p`, not on traversal luck.
pub fn refine(g: &ColoredGraph, p: &OrderedPartition) -> OrderedPartition {
    let mut cells = p.cells.clone();
    let mut counts = vec![0u32; g.n()];
    'stable: loop {
        for s in 0..cells.len() {
            counts.iter_mut().for_each(|c| *c = 0);
            for &v in &cells[s] {
                for &w in g.neighbors(v) {
                    counts[w as usize] += 1;
                }
            }
            for x in 0..cells.len() {
                let cell = &cells[x];
                if cell.len() < 2 {
                    continue;
                }
                let first = counts[cell[0] as usize];
                if cell.iter().all(|&v| counts[v as usize] == first) {
                    continue;
                }
                let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
                for &v in cell {
                    groups.entry(counts[v as usize]).or_default().push(v);
                }
                cells.splice(x..x + 1, groups.into_values());
                continue 'stable;
            }
        }
        break;
    }
    let mut out = OrderedPartition { cells, cell_of: Vec::new() };
    out.rebuild_cell_of(g.n());
    out
}

/// A vertex permutation that passed the independent automorphism check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGenerator {
    pub perm: Vec<u32>,
}

#[derive(Debug)]
pub struct AutomResult {
    pub generators: Vec<AutomorphismGenerator>,
    /// False when the node budget cut the search short; the generators
    /// found so far are still valid automorphisms, just maybe not all.
    pub complete: bool,
    pub nodes: u64,
}

pub fn find_generators(g: &ColoredGraph) -> AutomResult {
    find_generators_budgeted(g, NODE_BUDGET_DEFAULT)
}

pub fn find_generators_budgeted(g: &ColoredGraph, budget: u64) -> AutomResult {
    let mut s = Search {
        g,
        first: None,
        shapes: Vec::new(),
        gens: Vec::new(),
        orbits: UnionFind::new(g.n()),
        nodes: 0,
        budget,
        complete: true,
    };
    s.dfs(OrderedPartition::from_colors(g), 0);
    AutomResult {
        generators: s.gens.into_iter().map(|perm| AutomorphismGenerator { perm }).collect(),
        complete: s.complete,
        nodes: s.nodes,
    }
}

struct Search<'g> {
    g: &'g ColoredGraph,
    /// Vertex sequence of the first discrete leaf; candidates map it to
    /// their own leaf sequence.
    first: Option<Vec<u32>>,
    /// Partition shapes along the path to the first leaf, by depth.
    shapes: Vec<Vec<usize>>,
    gens: Vec<Vec<u32>>,
    orbits: UnionFind,
    nodes: u64,
    budget: u64,
    complete: bool,
}

impl Search<'_> {
    fn dfs(&mut self, p: OrderedPartition, depth: usize) {
        if self.nodes >= self.budget {
            self.complete = false;
            return;
        }
        self.nodes += 1;
        let p = refine(self.g, &p);

        // Refinement commutes with automorphisms, so a path whose shape
        // trace leaves the first leaf's trace cannot reach a matching leaf.
        let shape = p.shape();
        if self.first.is_none() {
            debug_assert_eq!(self.shapes.len(), depth);
            self.shapes.push(shape);
        } else if self.shapes.get(depth) != Some(&shape) {
            return;
        }

        let Some(target) = p.target_cell() else {
            let seq = p.sequence();
            match &self.first {
                None => self.first = Some(seq),
                Some(first) => {
                    let mut perm = vec![0u32; self.g.n()];
                    for (a, b) in first.iter().zip(&seq) {
                        perm[*a as usize] = *b;
                    }
                    let identity = perm.iter().enumerate().all(|(v, &w)| v as u32 == w);
                    if !identity && !self.gens.contains(&perm) && self.g.is_automorphism(&perm) {
                        for (v, &w) in perm.iter().enumerate() {
                            self.orbits.union(v, w as usize);
                        }
                        self.gens.push(perm);
                    }
                }
            }
            return;
        };

        let vertices = p.cells()[target].clone();
        let mut tried: Vec<u32> = Vec::new();
        for &v in &vertices {
            // Orbit pruning, first branching level only: a vertex already
            // reachable from a tried one by known automorphisms starts a
            // subtree whose leaves are all products of known generators.
            if depth == 0 && tried.iter().any(|&w| self.orbits.same(v as usize, w as usize)) {
                continue;
            }
            tried.push(v);
            self.dfs(p.individualize(v), depth + 1);
        }
    }
}

/// Exact order of the group generated by `gens` (permutations of
/// `0..degree` as image arrays), by breadth-first closure.
pub fn group_order_small(
    degree: usize,
    gens: &[Vec<u32>],
    budget: usize,
) -> Result<u64, ClosureBudget> {
    let id: Vec<u32> = (0..degree as u32).collect();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(p) = frontier.pop() {
        for gen in gens {
            let q: Vec<u32> = p.iter().map(|&v| gen[v as usize]).collect();
            if seen.contains(&q) {
                continue;
            }
            if seen.len() >= budget {
                return Err(ClosureBudget(budget));
            }
            seen.insert(q.clone());
            frontier.push(q);
        }
    }
    Ok(seen.len() as u64)
}

/// Reads the domain permutation off a generator's DE layer.
pub fn to_domain_permutation(gen: &AutomorphismGenerator, m: &DpgMapping) -> DomainPermutation {
    m.restrict(&gen.perm)
}
