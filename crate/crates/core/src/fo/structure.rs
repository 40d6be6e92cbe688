//! Domains and structures.
//!
//! Domain elements are interned: an element is identified by its
//! declaration index. Separately from declaration order, a domain
//! carries a total order used wherever tuples or elements have to be
//! ranked (tuple enumeration, ground atom order, lex-leader breaking).
//! By default the two orders coincide.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

pub type ElemId = u32;
pub type Tuple = Vec<ElemId>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("domain element `{0}` declared twice")]
    Duplicate(String),
    #[error("domain is empty")]
    Empty,
    #[error("order is not a permutation of the domain (near `{0}`)")]
    BadOrder(String),
}

#[derive(Debug, PartialEq, Eq)]
pub struct Domain {
    names: Vec<String>,
    by_name: HashMap<String, ElemId>,
    /// rank[e] = position of element e in the domain order.
    rank: Vec<u32>,
    /// Elements listed in domain order.
    ordered: Vec<ElemId>,
}

impl Domain {
    pub fn new(names: Vec<String>) -> Result<Arc<Domain>, DomainError> {
        let order: Vec<String> = names.clone();
        Domain::with_order(names, &order)
    }

    /// Domain with an explicit element order; `order` must list every
    /// declared element exactly once.
    pub fn with_order(names: Vec<String>, order: &[String]) -> Result<Arc<Domain>, DomainError> {
        if names.is_empty() {
            return Err(DomainError::Empty);
        }
        let mut by_name = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if by_name.insert(n.clone(), i as ElemId).is_some() {
                return Err(DomainError::Duplicate(n.clone()));
            }
        }
        if order.len() != names.len() {
            return Err(DomainError::BadOrder(format!("{} of {} elements", order.len(), names.len())));
        }
        let mut rank = vec![u32::MAX; names.len()];
        let mut ordered = Vec::with_capacity(names.len());
        for (pos, n) in order.iter().enumerate() {
            let e = *by_name.get(n).ok_or_else(|| DomainError::BadOrder(n.clone()))?;
            if rank[e as usize] != u32::MAX {
                return Err(DomainError::BadOrder(n.clone()));
            }
            rank[e as usize] = pos as u32;
            ordered.push(e);
        }
        Ok(Arc::new(Domain { names, by_name, rank, ordered }))
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, e: ElemId) -> &str {
        &self.names[e as usize]
    }

    pub fn id(&self, name: &str) -> Option<ElemId> {
        self.by_name.get(name).copied()
    }

    pub fn rank(&self, e: ElemId) -> u32 {
        self.rank[e as usize]
    }

    /// All elements in domain order.
    pub fn elems_ordered(&self) -> &[ElemId] {
        &self.ordered
    }

    /// All elements in declaration order.
    pub fn elems(&self) -> std::ops::Range<ElemId> {
        0..self.names.len() as ElemId
    }

    /// Compare tuples lexicographically by element rank.
    pub fn cmp_tuples(&self, a: &[ElemId], b: &[ElemId]) -> std::cmp::Ordering {
        let ra = a.iter().map(|&e| self.rank(e));
        let rb = b.iter().map(|&e| self.rank(e));
        ra.cmp(rb)
    }

    /// Tuples of the given width in rank-lexicographic order.
    pub fn tuples(&self, width: usize) -> TupleIter<'_> {
        TupleIter { domain: self, width, next: Some(vec![0; width]), started: false }
    }
}

/// Iterates over all `width`-tuples, ordered lexicographically by rank.
pub struct TupleIter<'a> {
    domain: &'a Domain,
    width: usize,
    next: Option<Vec<usize>>,
    started: bool,
}

impl Iterator for TupleIter<'_> {
    type Item = Tuple;

    fn next(&mut self) -> Option<Tuple> {
        // Odometer over rank indices; element ids come from `ordered`.
        if !self.started {
            self.started = true;
        } else {
            let idx = self.next.as_mut()?;
            let mut i = self.width;
            loop {
                if i == 0 {
                    self.next = None;
                    return None;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < self.domain.size() {
                    break;
                }
                idx[i] = 0;
            }
        }
        let idx = self.next.as_ref()?;
        Some(idx.iter().map(|&r| self.domain.ordered[r]).collect())
    }
}

pub type Relation = BTreeSet<Tuple>;
pub type FuncGraph = BTreeMap<Tuple, ElemId>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("symbol `{0}` interpreted twice")]
    Duplicate(String),
    #[error("structures to merge have different domains")]
    DomainMismatch,
    #[error("symbol `{0}` interpreted by both structures")]
    Overlap(String),
}

/// Interpretations of some set of symbols over a shared domain.
///
/// Interpretations are reference counted so that decomposition copies
/// can share the tuple sets of the original symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    domain: Arc<Domain>,
    rels: BTreeMap<String, Arc<Relation>>,
    funcs: BTreeMap<String, Arc<FuncGraph>>,
}

impl Structure {
    pub fn new(domain: Arc<Domain>) -> Structure {
        Structure { domain, rels: BTreeMap::new(), funcs: BTreeMap::new() }
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn set_rel(&mut self, name: &str, rel: Arc<Relation>) -> Result<(), StructureError> {
        if self.rels.contains_key(name) || self.funcs.contains_key(name) {
            return Err(StructureError::Duplicate(name.into()));
        }
        self.rels.insert(name.into(), rel);
        Ok(())
    }

    pub fn set_func(&mut self, name: &str, graph: Arc<FuncGraph>) -> Result<(), StructureError> {
        if self.rels.contains_key(name) || self.funcs.contains_key(name) {
            return Err(StructureError::Duplicate(name.into()));
        }
        self.funcs.insert(name.into(), graph);
        Ok(())
    }

    pub fn rel(&self, name: &str) -> Option<&Arc<Relation>> {
        self.rels.get(name)
    }

    pub fn func(&self, name: &str) -> Option<&Arc<FuncGraph>> {
        self.funcs.get(name)
    }

    pub fn interprets(&self, name: &str) -> bool {
        self.rels.contains_key(name) || self.funcs.contains_key(name)
    }

    pub fn rels(&self) -> impl Iterator<Item = (&str, &Arc<Relation>)> {
        self.rels.iter().map(|(n, r)| (n.as_str(), r))
    }

    pub fn funcs(&self) -> impl Iterator<Item = (&str, &Arc<FuncGraph>)> {
        self.funcs.iter().map(|(n, g)| (n.as_str(), g))
    }

    /// Interpreted symbol names, in map order.
    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.rels.keys().map(|s| s.as_str()).chain(self.funcs.keys().map(|s| s.as_str()))
    }

    /// The structure extended with `name` as a constant valued `e`; an
    /// existing zero-ary interpretation of `name` is replaced.
    pub fn extend(&self, name: &str, e: ElemId) -> Structure {
        let mut s = self.clone();
        let mut g = FuncGraph::new();
        g.insert(Vec::new(), e);
        s.funcs.insert(name.into(), Arc::new(g));
        s
    }

    /// Union of two structures over the same domain with disjoint
    /// interpreted symbols.
    pub fn merge(&self, other: &Structure) -> Result<Structure, StructureError> {
        if self.domain != other.domain {
            return Err(StructureError::DomainMismatch);
        }
        let mut out = self.clone();
        for (n, r) in &other.rels {
            if out.interprets(n) {
                return Err(StructureError::Overlap(n.clone()));
            }
            out.rels.insert(n.clone(), r.clone());
        }
        for (n, g) in &other.funcs {
            if out.interprets(n) {
                return Err(StructureError::Overlap(n.clone()));
            }
            out.funcs.insert(n.clone(), g.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_keeps_declaration_indices() {
        let d = Domain::new(vec!["t".into(), "u".into(), "v".into()]).unwrap();
        assert_eq!(d.id("t"), Some(0));
        assert_eq!(d.id("v"), Some(2));
        assert_eq!(d.name(1), "u");
        assert_eq!(d.id("w"), None);
    }

    #[test]
    fn explicit_order_changes_ranks_not_ids() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let order: Vec<String> = ["c", "a", "b"].iter().map(|s| s.to_string()).collect();
        let d = Domain::with_order(names, &order).unwrap();
        assert_eq!(d.id("a"), Some(0));
        assert_eq!(d.rank(d.id("c").unwrap()), 0);
        assert_eq!(d.elems_ordered(), &[2, 0, 1]);
    }

    #[test]
    fn bad_order_rejected() {
        let names: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let order: Vec<String> = ["a", "a"].iter().map(|s| s.to_string()).collect();
        assert!(Domain::with_order(names, &order).is_err());
    }

    #[test]
    fn tuple_iteration_follows_rank_order() {
        let names: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let order: Vec<String> = ["b", "a"].iter().map(|s| s.to_string()).collect();
        let d = Domain::with_order(names, &order).unwrap();
        let tuples: Vec<Tuple> = d.tuples(2).collect();
        // b < a, so (b,b), (b,a), (a,b), (a,a).
        assert_eq!(tuples, vec![vec![1, 1], vec![1, 0], vec![0, 1], vec![0, 0]]);
        assert_eq!(d.tuples(0).count(), 1);
    }

    #[test]
    fn merge_rejects_overlap() {
        let d = Domain::new(vec!["a".into()]).unwrap();
        let mut s1 = Structure::new(d.clone());
        s1.set_rel("P", Arc::new(Relation::new())).unwrap();
        let mut s2 = Structure::new(d);
        s2.set_rel("P", Arc::new(Relation::new())).unwrap();
        assert_eq!(s1.merge(&s2), Err(StructureError::Overlap("P".into())));
    }
}
