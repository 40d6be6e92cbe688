//! Domain permutations and the structure transformations they induce.
//!
//! A domain permutation π, restricted to a set A of argument positions,
//! induces a transformation on structures: a tuple component at slot `S|i`
//! is mapped through π exactly when `S|i` is in A. With A the set of all
//! positions this is the usual action of π on a structure; with smaller,
//! connectively closed A it can fix an input structure that π itself does
//! not, which is what makes local symmetries worth looking for.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::argpos::{ArgPos, ArgPosSet};
use crate::fo::{
    enumerate_expansions, Domain, ElemId, EnumError, FuncGraph, Problem, Relation, Structure,
    SymbolKind,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("permutation image is not a bijection")]
    NotBijective,
    #[error("bad cycle notation: {0}")]
    Cycles(String),
}

/// A total bijection over the domain, stored as an element-indexed image.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DomainPermutation {
    map: Vec<ElemId>,
}

impl DomainPermutation {
    pub fn identity(n: usize) -> DomainPermutation {
        DomainPermutation { map: (0..n as ElemId).collect() }
    }

    pub fn from_map(map: Vec<ElemId>) -> Result<DomainPermutation, PermError> {
        let mut seen = vec![false; map.len()];
        for &e in &map {
            if (e as usize) >= map.len() || seen[e as usize] {
                return Err(PermError::NotBijective);
            }
            seen[e as usize] = true;
        }
        Ok(DomainPermutation { map })
    }

    /// The transposition (a b) on a domain of size n.
    pub fn transposition(n: usize, a: ElemId, b: ElemId) -> DomainPermutation {
        let mut p = DomainPermutation::identity(n);
        p.map.swap(a as usize, b as usize);
        p
    }

    /// Parses cycle notation over named elements: `"(t u v w) (r g)"`.
    /// `"()"` is the identity.
    pub fn parse_cycles(domain: &Domain, text: &str) -> Result<DomainPermutation, PermError> {
        let mut perm = DomainPermutation::identity(domain.size());
        let mut moved = vec![false; domain.size()];
        let bad = |msg: String| PermError::Cycles(msg);
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(stripped) = rest.strip_prefix('(') else {
                return Err(bad(format!("expected '(' at '{rest}'")));
            };
            let Some(end) = stripped.find(')') else {
                return Err(bad("unclosed cycle".into()));
            };
            let mut cycle = Vec::new();
            for name in stripped[..end].split_whitespace() {
                let e = domain.id(name).ok_or_else(|| bad(format!("unknown element '{name}'")))?;
                if moved[e as usize] {
                    return Err(bad(format!("element '{name}' appears twice")));
                }
                moved[e as usize] = true;
                cycle.push(e);
            }
            for (i, &e) in cycle.iter().enumerate() {
                perm.map[e as usize] = cycle[(i + 1) % cycle.len()];
            }
            rest = stripped[end + 1..].trim_start();
        }
        Ok(perm)
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    /// The image array: element e maps to `image()[e]`.
    pub fn image(&self) -> &[ElemId] {
        &self.map
    }

    pub fn apply(&self, e: ElemId) -> ElemId {
        self.map[e as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &e)| i as ElemId == e)
    }

    pub fn inverse(&self) -> DomainPermutation {
        let mut map = vec![0; self.map.len()];
        for (i, &e) in self.map.iter().enumerate() {
            map[e as usize] = i as ElemId;
        }
        DomainPermutation { map }
    }

    /// The permutation that applies `self` first and `other` second.
    pub fn then(&self, other: &DomainPermutation) -> DomainPermutation {
        DomainPermutation { map: self.map.iter().map(|&e| other.apply(e)).collect() }
    }

    /// Nontrivial cycles, each starting at its least element, ordered by
    /// that element.
    pub fn cycles(&self) -> Vec<Vec<ElemId>> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.map.len()];
        for start in 0..self.map.len() as ElemId {
            if seen[start as usize] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start as usize] = true;
            let mut e = self.apply(start);
            while e != start {
                seen[e as usize] = true;
                cycle.push(e);
                e = self.apply(e);
            }
            out.push(cycle);
        }
        out
    }

    pub fn format_cycles(&self, domain: &Domain) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".into();
        }
        cycles
            .iter()
            .map(|c| {
                let names: Vec<&str> = c.iter().map(|&e| domain.name(e)).collect();
                format!("({})", names.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The transformation σ that applies `perm` to tuple components sitting at
/// one of `positions`. Positions over symbols a structure does not
/// interpret are ignored when applying it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedTransform {
    pub positions: ArgPosSet,
    pub perm: DomainPermutation,
}

impl InducedTransform {
    pub fn new(positions: ArgPosSet, perm: DomainPermutation) -> InducedTransform {
        InducedTransform { positions, perm }
    }

    fn touches(&self, sym: &str) -> bool {
        self.positions
            .range(ArgPos::new(sym, 0)..=ArgPos::new(sym, usize::MAX))
            .next()
            .is_some()
    }

    /// Per-index flags for the argument slots `sym|1 ..= sym|width`.
    fn arg_mask(&self, sym: &str, width: usize) -> Vec<bool> {
        (1..=width).map(|i| self.positions.contains(&ArgPos::new(sym, i))).collect()
    }

    pub fn apply_to(&self, s: &Structure) -> Structure {
        assert_eq!(self.perm.degree(), s.domain().size(), "permutation degree != domain size");
        let mut out = Structure::new(s.domain().clone());
        for (name, rel) in s.rels() {
            if !self.touches(name) || rel.is_empty() {
                out.set_rel(name, rel.clone()).unwrap();
                continue;
            }
            let mask = self.arg_mask(name, rel.iter().next().unwrap().len());
            let image: Relation = rel.iter().map(|t| self.map_tuple(t, &mask)).collect();
            out.set_rel(name, Arc::new(image)).unwrap();
        }
        for (name, graph) in s.funcs() {
            if !self.touches(name) {
                out.set_func(name, graph.clone()).unwrap();
                continue;
            }
            let width = graph.keys().next().map(Vec::len).unwrap_or(0);
            let mask = self.arg_mask(name, width);
            let out_slot = self.positions.contains(&ArgPos::new(name, 0));
            let image: FuncGraph = graph
                .iter()
                .map(|(t, &r)| {
                    (self.map_tuple(t, &mask), if out_slot { self.perm.apply(r) } else { r })
                })
                .collect();
            out.set_func(name, Arc::new(image)).unwrap();
        }
        out
    }

    fn map_tuple(&self, t: &[ElemId], mask: &[bool]) -> Vec<ElemId> {
        t.iter()
            .zip(mask)
            .map(|(&e, &hit)| if hit { self.perm.apply(e) } else { e })
            .collect()
    }

    /// Is `s` a fixpoint of this transformation? Decided by per-tuple
    /// membership probes, without building the transformed structure: the
    /// tuple map is injective, so image ⊆ R already forces image = R.
    pub fn fixes(&self, s: &Structure) -> bool {
        assert_eq!(self.perm.degree(), s.domain().size(), "permutation degree != domain size");
        let mut probe: Vec<ElemId> = Vec::new();
        for (name, rel) in s.rels() {
            if !self.touches(name) || rel.is_empty() {
                continue;
            }
            let mask = self.arg_mask(name, rel.iter().next().unwrap().len());
            if mask.iter().all(|&m| !m) {
                continue;
            }
            for t in rel.iter() {
                probe.clear();
                probe.extend(t.iter().zip(&mask).map(|(&e, &m)| if m { self.perm.apply(e) } else { e }));
                if !rel.contains(probe.as_slice()) {
                    return false;
                }
            }
        }
        for (name, graph) in s.funcs() {
            if !self.touches(name) {
                continue;
            }
            let width = graph.keys().next().map(Vec::len).unwrap_or(0);
            let mask = self.arg_mask(name, width);
            let out_slot = self.positions.contains(&ArgPos::new(name, 0));
            if !out_slot && mask.iter().all(|&m| !m) {
                continue;
            }
            for (t, &r) in graph.iter() {
                probe.clear();
                probe.extend(t.iter().zip(&mask).map(|(&e, &m)| if m { self.perm.apply(e) } else { e }));
                let want = if out_slot { self.perm.apply(r) } else { r };
                if graph.get(probe.as_slice()) != Some(&want) {
                    return false;
                }
            }
        }
        true
    }
}

/// Every permutation of `0..n`, in lexicographic order of their image
/// arrays. Exhaustive verification helper; n stays desk-sized.
pub fn all_permutations(n: usize) -> Vec<DomainPermutation> {
    let mut out = Vec::new();
    let mut map: Vec<ElemId> = (0..n as ElemId).collect();
    loop {
        out.push(DomainPermutation { map: map.clone() });
        // Next lexicographic image array, if any.
        let Some(i) = map.windows(2).rposition(|w| w[0] < w[1]) else {
            return out;
        };
        let j = map.iter().rposition(|&e| e > map[i]).unwrap();
        map.swap(i, j);
        map[i + 1..].reverse();
    }
}

/// Brute-force check that `t` is a symmetry of the model-expansion problem:
/// over every candidate output structure, `t` maps solutions to solutions
/// and non-solutions to non-solutions. Exponential; only for verification
/// at desk scale.
pub fn is_mx_symmetry_oracle(
    t: &InducedTransform,
    p: &Problem,
    budget: u64,
) -> Result<bool, EnumError> {
    for e in enumerate_expansions(p, budget)? {
        let direct = p.is_solution(&e).expect("enumerated expansions are total");
        let mapped = p.is_solution(&t.apply_to(&e)).expect("transformed expansions are total");
        if direct != mapped {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Batched form of the symmetry oracle: one enumeration sweep serves
/// every transform. Checking that solutions map into solutions is
/// enough because each transform permutes the expansion space, so the
/// verdicts agree with running `is_mx_symmetry_oracle` per transform.
pub fn are_mx_symmetries_oracle(
    ts: &[InducedTransform],
    p: &Problem,
    budget: u64,
) -> Result<Vec<bool>, EnumError> {
    let mut solutions = Vec::new();
    let mut codes = HashSet::new();
    for e in enumerate_expansions(p, budget)? {
        if p.is_solution(&e).expect("enumerated expansions are total") {
            codes.insert(encode_output(p, &e));
            solutions.push(e);
        }
    }
    Ok(ts
        .iter()
        .map(|t| solutions.iter().all(|s| codes.contains(&encode_output(p, &t.apply_to(s)))))
        .collect())
}

/// Canonical code of an output structure: slot values in the
/// enumeration's odometer layout.
fn encode_output(p: &Problem, s: &Structure) -> Vec<u32> {
    let domain = p.domain();
    let mut code = Vec::new();
    for sym in p.vocab.outputs() {
        match sym.kind {
            SymbolKind::Pred => {
                let rel = s.rel(&sym.name);
                for t in domain.tuples(sym.arity) {
                    code.push(rel.is_some_and(|r| r.contains(&t)) as u32);
                }
            }
            SymbolKind::Func => {
                let graph = s.func(&sym.name).expect("output functions are total");
                for t in domain.tuples(sym.arity) {
                    code.push(graph[&t]);
                }
            }
        }
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::argpos::{all_positions, closed_partition};
    use crate::fo::ENUM_BUDGET_DEFAULT;
    use crate::testfix::{coloring, coloring_output};

    fn pos(s: &str) -> ArgPos {
        ArgPos::parse(s).unwrap()
    }

    fn assert_rel(s: &Structure, rel: &str, want: &[&[&str]]) {
        use std::collections::BTreeSet;
        let got: BTreeSet<Vec<String>> = s
            .rel(rel)
            .unwrap()
            .iter()
            .map(|t| t.iter().map(|&e| s.domain().name(e).to_string()).collect())
            .collect();
        let want: BTreeSet<Vec<String>> =
            want.iter().map(|t| t.iter().map(|n| n.to_string()).collect()).collect();
        assert_eq!(got, want, "{rel}");
    }

    #[test]
    fn cycle_notation_round_trips() {
        let p = coloring();
        let d = p.domain();
        let perm = DomainPermutation::parse_cycles(d, "(t u v w) (r g)").unwrap();
        assert_eq!(perm.format_cycles(d), "(t u v w) (r g)");
        assert_eq!(perm.apply(d.id("w").unwrap()), d.id("t").unwrap());
        assert!(DomainPermutation::parse_cycles(d, "()").unwrap().is_identity());
        assert!(matches!(
            DomainPermutation::parse_cycles(d, "(t q)"),
            Err(PermError::Cycles(_))
        ));
        assert!(matches!(
            DomainPermutation::parse_cycles(d, "(t u) (u v)"),
            Err(PermError::Cycles(_))
        ));
        assert!(matches!(
            DomainPermutation::parse_cycles(d, "t u"),
            Err(PermError::Cycles(_))
        ));
    }

    #[test]
    fn from_map_rejects_non_bijections() {
        assert!(DomainPermutation::from_map(vec![0, 0]).is_err());
        assert!(DomainPermutation::from_map(vec![0, 2]).is_err());
        assert_eq!(
            DomainPermutation::from_map(vec![1, 0]).unwrap(),
            DomainPermutation::transposition(2, 0, 1)
        );
    }

    #[test]
    fn inverse_and_composition_behave_like_a_group() {
        let p = coloring();
        let d = p.domain();
        let a = DomainPermutation::parse_cycles(d, "(t u v w)").unwrap();
        let b = DomainPermutation::parse_cycles(d, "(t u) (r g b)").unwrap();
        assert!(a.then(&a.inverse()).is_identity());
        for e in d.elems() {
            assert_eq!(a.then(&b).apply(e), b.apply(a.apply(e)));
        }
    }

    #[test]
    fn all_permutations_enumerates_the_symmetric_group() {
        let perms = all_permutations(4);
        assert_eq!(perms.len(), 24);
        let distinct: std::collections::BTreeSet<_> = perms.iter().collect();
        assert_eq!(distinct.len(), 24);
        assert!(perms[0].is_identity());
    }

    #[test]
    fn global_transform_moves_every_slot() {
        let p = coloring();
        let d = p.domain();
        let perm = DomainPermutation::parse_cycles(d, "(v r)").unwrap();
        let all = all_positions(&p.vocab, &p.theory);
        let t = InducedTransform::new(all, perm);
        let img = t.apply_to(&p.input);
        assert_rel(&img, "V", &[&["t"], &["u"], &["r"], &["w"]]);
        assert_rel(&img, "C", &[&["v"], &["g"], &["b"]]);
        assert_rel(&img, "Edge", &[&["t", "u"], &["u", "r"], &["r", "w"], &["w", "t"]]);
    }

    #[test]
    fn restricted_transform_moves_only_its_positions() {
        let p = coloring();
        let d = p.domain();
        let perm = DomainPermutation::parse_cycles(d, "(v r)").unwrap();
        let a: ArgPosSet = [pos("C|1"), pos("Color|0")].into_iter().collect();
        let t = InducedTransform::new(a, perm);
        let full = p.input.merge(&coloring_output(&p)).unwrap();
        let img = t.apply_to(&full);
        assert_eq!(img.rel("V"), full.rel("V"));
        assert_eq!(img.rel("Edge"), full.rel("Edge"));
        assert_rel(&img, "C", &[&["v"], &["g"], &["b"]]);
        let color = img.func("Color").unwrap();
        assert_eq!(color[&vec![d.id("t").unwrap()]], d.id("v").unwrap());
        // Argument slot Color|1 is outside A, so the key stays put.
        assert_eq!(color[&vec![d.id("r").unwrap()]], d.id("v").unwrap());
        assert!(t.fixes(&full) == (img == full));
    }

    #[test]
    fn identity_fixes_everything() {
        let p = coloring();
        let t = InducedTransform::new(
            all_positions(&p.vocab, &p.theory),
            DomainPermutation::identity(p.domain().size()),
        );
        let full = p.input.merge(&coloring_output(&p)).unwrap();
        assert_eq!(t.apply_to(&full), full);
        assert!(t.fixes(&full));
    }

    #[test]
    fn fixing_the_decomposed_input_depends_on_the_permutation() {
        let p = coloring();
        let d = crate::decompose::decompose(&p);
        let dom = p.domain();
        let blocks = closed_partition(&d.problem.vocab, &d.problem.theory);
        let block = blocks.iter().find(|b| b.contains(&pos("Edge#1|1"))).unwrap().clone();

        let rotate = DomainPermutation::parse_cycles(dom, "(t u v w)").unwrap();
        assert!(InducedTransform::new(block.clone(), rotate).fixes(&d.problem.input));

        let swap = DomainPermutation::parse_cycles(dom, "(t u)").unwrap();
        assert!(!InducedTransform::new(block, swap).fixes(&d.problem.input));
    }

    #[test]
    fn induced_transforms_compose_pointwise() {
        let p = coloring();
        let dom = p.domain();
        let blocks = closed_partition(&p.vocab, &p.theory);
        let a = blocks.iter().find(|b| b.contains(&pos("Color|1"))).unwrap().clone();
        let p1 = DomainPermutation::parse_cycles(dom, "(t u v w)").unwrap();
        let p2 = DomainPermutation::parse_cycles(dom, "(t v)").unwrap();
        let full = p.input.merge(&coloring_output(&p)).unwrap();

        let first = InducedTransform::new(a.clone(), p1.clone()).apply_to(&full);
        let second = InducedTransform::new(a.clone(), p2.clone()).apply_to(&first);
        let fused = InducedTransform::new(a.clone(), p1.then(&p2)).apply_to(&full);
        assert_eq!(second, fused);

        let undone = InducedTransform::new(a.clone(), p1.inverse())
            .apply_to(&InducedTransform::new(a, p1).apply_to(&full));
        assert_eq!(undone, full);
    }

    #[test]
    fn oracle_accepts_the_rotation_and_rejects_the_color_swap() {
        let p = coloring();
        let dom = p.domain();
        let blocks = closed_partition(&p.vocab, &p.theory);
        let a = blocks.iter().find(|b| b.contains(&pos("Color|1"))).unwrap().clone();

        let rotate = DomainPermutation::parse_cycles(dom, "(t u v w)").unwrap();
        let t = InducedTransform::new(a.clone(), rotate);
        assert!(t.fixes(&p.input));
        assert!(is_mx_symmetry_oracle(&t, &p, ENUM_BUDGET_DEFAULT).unwrap());

        let vr = DomainPermutation::parse_cycles(dom, "(v r)").unwrap();
        let t = InducedTransform::new(a, vr);
        assert!(!t.fixes(&p.input));
        assert!(!is_mx_symmetry_oracle(&t, &p, ENUM_BUDGET_DEFAULT).unwrap());
    }
}
