//! Interchangeable subdomains.
//!
//! Two domain elements are interchangeable with respect to a position set A
//! and a structure I when swapping them at the A-positions leaves I
//! unchanged. The relation is transitive: preserving transpositions
//! compose, and any transposition inside a connected group of passing
//! swaps is a product of passing swaps. Maximal interchangeable subdomains
//! therefore form a partition of the domain, computable from pairwise swap
//! checks alone.

use std::collections::BTreeMap;

use crate::argpos::{ArgPos, ArgPosSet};
use crate::dset::UnionFind;
use crate::fo::{ElemId, Structure};
use crate::transform::{DomainPermutation, InducedTransform};

/// Maximal interchangeable subdomains, each sorted by the domain order,
/// blocks ordered by their first element. Every domain element occurs in
/// exactly one block; singleton blocks mean the element is interchangeable
/// with nothing else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterchangeablePartition {
    pub blocks: Vec<Vec<ElemId>>,
}

impl InterchangeablePartition {
    /// Blocks with at least two elements, the only ones worth breaking on.
    pub fn nontrivial(&self) -> impl Iterator<Item = &Vec<ElemId>> {
        self.blocks.iter().filter(|b| b.len() >= 2)
    }
}

/// Does swapping `d1` and `d2` at the A-positions leave `i` unchanged?
pub fn swap_preserves(i: &Structure, a: &ArgPosSet, d1: ElemId, d2: ElemId) -> bool {
    let perm = DomainPermutation::transposition(i.domain().size(), d1, d2);
    InducedTransform::new(a.clone(), perm).fixes(i)
}

/// Per-element occurrence counts at each A-position of each interpreted
/// symbol. Elements with different signatures cannot swap-preserve, so
/// signatures bucket the quadratic pair scan.
fn signatures(i: &Structure, a: &ArgPosSet) -> Vec<Vec<u32>> {
    let n = i.domain().size();
    let mut sig = vec![Vec::new(); n];
    let mut record = |counts: &mut Vec<Vec<u32>>| {
        for (e, c) in counts.iter_mut().enumerate() {
            sig[e].append(c);
        }
    };
    let slot_counts = |width: usize| vec![vec![0u32; width]; n];
    for (name, rel) in i.rels() {
        let width = rel.iter().next().map(Vec::len).unwrap_or(0);
        let hits: Vec<usize> =
            (0..width).filter(|&ix| a.contains(&ArgPos::new(name, ix + 1))).collect();
        if hits.is_empty() {
            continue;
        }
        let mut counts = slot_counts(hits.len());
        for t in rel.iter() {
            for (ci, &ix) in hits.iter().enumerate() {
                counts[t[ix] as usize][ci] += 1;
            }
        }
        record(&mut counts);
    }
    for (name, graph) in i.funcs() {
        let width = graph.keys().next().map(Vec::len).unwrap_or(0);
        let hits: Vec<usize> =
            (0..width).filter(|&ix| a.contains(&ArgPos::new(name, ix + 1))).collect();
        let out_slot = a.contains(&ArgPos::new(name, 0));
        if hits.is_empty() && !out_slot {
            continue;
        }
        let mut counts = slot_counts(hits.len() + usize::from(out_slot));
        for (t, &r) in graph.iter() {
            for (ci, &ix) in hits.iter().enumerate() {
                counts[t[ix] as usize][ci] += 1;
            }
            if out_slot {
                counts[r as usize][hits.len()] += 1;
            }
        }
        record(&mut counts);
    }
    sig
}

/// Partitions the domain into maximal A-interchangeable subdomains by
/// testing swaps pairwise. Pairs already joined transitively or separated
/// by their occurrence signatures are skipped; both shortcuts are exact.
/// Pairs run in domain order, so blocks come out sorted by it.
pub fn interchangeable_partition(i: &Structure, a: &ArgPosSet) -> InterchangeablePartition {
    let dom = i.domain();
    let by_rank = dom.elems_ordered();
    let n = by_rank.len();
    let sig = signatures(i, a);
    let mut uf = UnionFind::new(n);
    for ri in 0..n {
        for rj in ri + 1..n {
            let (di, dj) = (by_rank[ri], by_rank[rj]);
            if uf.same(ri, rj) || sig[di as usize] != sig[dj as usize] {
                continue;
            }
            if swap_preserves(i, a, di, dj) {
                uf.union(ri, rj);
            }
        }
    }
    let blocks = uf
        .sets()
        .into_iter()
        .map(|ranks| ranks.into_iter().map(|r| by_rank[r]).collect())
        .collect();
    InterchangeablePartition { blocks }
}

/// Exponential-flavored oracle for tests: classifies elements from a full
/// pairwise matrix of materialized transforms, then re-verifies every
/// within-block and cross-block pair. Independent of the union-find and
/// signature shortcuts above.
pub fn bruteforce_partition(i: &Structure, a: &ArgPosSet) -> Vec<Vec<ElemId>> {
    let dom = i.domain();
    let n = dom.size();
    let pair = |d1: ElemId, d2: ElemId| {
        let perm = DomainPermutation::transposition(n, d1, d2);
        InducedTransform::new(a.clone(), perm).apply_to(i) == *i
    };
    let mut classes: Vec<Vec<ElemId>> = Vec::new();
    for &d in dom.elems_ordered() {
        match classes.iter_mut().find(|c| pair(c[0], d)) {
            Some(c) => c.push(d),
            None => classes.push(vec![d]),
        }
    }
    for (ci, c) in classes.iter().enumerate() {
        for (cj, other) in classes.iter().enumerate() {
            for &x in c {
                for &y in other {
                    if x != y {
                        assert_eq!(pair(x, y), ci == cj, "swap relation is not an equivalence");
                    }
                }
            }
        }
    }
    classes
}

/// Occurrence signature groups, exposed for reporting: how many elements
/// share each signature. Useful to explain why a pair was never tested.
pub fn signature_groups(i: &Structure, a: &ArgPosSet) -> BTreeMap<Vec<u32>, Vec<ElemId>> {
    let sig = signatures(i, a);
    let mut groups: BTreeMap<Vec<u32>, Vec<ElemId>> = BTreeMap::new();
    let dom = i.domain();
    for &e in dom.elems_ordered() {
        groups.entry(sig[e as usize].clone()).or_default().push(e);
    }
    groups
}
