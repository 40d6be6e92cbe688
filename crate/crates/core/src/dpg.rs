//! Domain permutation graphs.
//!
//! A colored graph whose automorphisms correspond exactly to the domain
//! permutations π with σ_π^A(I) = I. Three layers:
//!
//!   DE  one vertex per domain element, all one color;
//!   AP  one vertex per (element, argument index), colored by index;
//!   IT  one vertex per interpreted tuple, colored by (symbol, projection
//!       of the tuple to the positions outside A).
//!
//! Element vertices connect to their own AP vertices; a tuple vertex
//! connects to the AP vertex (d, i) for each A-position `S|i` holding d.
//! An automorphism must fix each layer setwise (colors differ), acts on DE
//! as some π, is forced to act on AP as (π(d), i), and must then map each
//! tuple to an interpreted tuple with the same fixed part, which is
//! precisely π preserving I at the A-positions. The graph's size depends
//! on the structure only, not on the theory.

use std::collections::BTreeMap;

use crate::argpos::{ArgPos, ArgPosSet};
use crate::fo::{ElemId, Structure, Tuple};
use crate::transform::DomainPermutation;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Layer {
    De,
    Ap,
    It,
}

/// Vertex-colored undirected graph with sorted adjacency lists.
#[derive(Clone, Debug)]
pub struct ColoredGraph {
    colors: Vec<u32>,
    layers: Vec<Layer>,
    labels: Vec<String>,
    adj: Vec<Vec<u32>>,
}

impl ColoredGraph {
    /// Graph from raw colors and edges, for the automorphism engine's own
    /// tests and for externally supplied graphs. Vertices are labeled by
    /// index; the layer tag defaults to DE and means nothing here.
    pub fn from_parts(colors: Vec<u32>, edges: &[(u32, u32)]) -> ColoredGraph {
        let n = colors.len();
        let mut g = ColoredGraph {
            colors,
            layers: vec![Layer::De; n],
            labels: (0..n).map(|v| v.to_string()).collect(),
            adj: vec![Vec::new(); n],
        };
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g.freeze();
        g
    }

    fn add_vertex(&mut self, color: u32, layer: Layer, label: String) -> u32 {
        self.colors.push(color);
        self.layers.push(layer);
        self.labels.push(label);
        self.adj.push(Vec::new());
        (self.colors.len() - 1) as u32
    }

    fn add_edge(&mut self, a: u32, b: u32) {
        self.adj[a as usize].push(b);
        self.adj[b as usize].push(a);
    }

    fn freeze(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, v: u32) -> u32 {
        self.colors[v as usize]
    }

    pub fn layer(&self, v: u32) -> Layer {
        self.layers[v as usize]
    }

    pub fn label(&self, v: u32) -> &str {
        &self.labels[v as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Is `perm` a color- and edge-preserving vertex bijection? Checks
    /// every directed edge; with a bijection that pins the image edge set.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        if perm.len() != self.n() {
            return false;
        }
        let mut seen = vec![false; self.n()];
        for (v, &w) in perm.iter().enumerate() {
            if (w as usize) >= self.n() || seen[w as usize] {
                return false;
            }
            seen[w as usize] = true;
            if self.colors[v] != self.colors[w as usize] {
                return false;
            }
        }
        for (v, &w) in perm.iter().enumerate() {
            for &u in &self.adj[v] {
                if !self.has_edge(w, perm[u as usize]) {
                    return false;
                }
            }
        }
        true
    }

    /// Line-based dump for cross-checking with external tools:
    /// `v <id> <color> <label>` then `e <a> <b>` with a < b.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in 0..self.n() {
            out.push_str(&format!("v {} {} {}\n", v, self.colors[v], self.labels[v]));
        }
        for v in 0..self.n() as u32 {
            for &w in self.neighbors(v) {
                if v < w {
                    out.push_str(&format!("e {v} {w}\n"));
                }
            }
        }
        out
    }
}

/// Associates graph vertices back to the structure: DE vertex v stands for
/// element `de[v]`, AP vertex `de.len() + j` for `ap[j]`, and tuple
/// vertices are keyed by (symbol, stored tuple), where a function entry
/// stores its arguments with the output value appended.
#[derive(Clone, Debug)]
pub struct DpgMapping {
    pub de: Vec<ElemId>,
    pub ap: Vec<(ElemId, u32)>,
    pub it: BTreeMap<(String, Tuple), u32>,
    /// Per symbol: which stored-tuple components sit at an A-position.
    masks: BTreeMap<String, Vec<bool>>,
}

impl DpgMapping {
    fn indices(&self) -> (usize, Vec<usize>) {
        let strides = self.ap.len() / self.de.len().max(1);
        let mut inv = vec![0usize; self.de.len()];
        for (v, &e) in self.de.iter().enumerate() {
            inv[e as usize] = v;
        }
        (strides, inv)
    }

    /// The canonical extension of π to a whole-graph vertex map: DE through
    /// π, AP as (π(d), i), tuples to their transformed tuples. None when
    /// some tuple's image is not interpreted; whether the result really is
    /// an automorphism is for `ColoredGraph::is_automorphism` to say.
    pub fn extend(&self, perm: &DomainPermutation) -> Option<Vec<u32>> {
        let (stride, inv) = self.indices();
        let nde = self.de.len();
        let mut out: Vec<u32> = Vec::with_capacity(nde + self.ap.len() + self.it.len());
        for &e in &self.de {
            out.push(inv[perm.apply(e) as usize] as u32);
        }
        for &(e, ix) in &self.ap {
            out.push((nde + inv[perm.apply(e) as usize] * stride + ix as usize) as u32);
        }
        let mut images: Vec<(u32, u32)> = Vec::with_capacity(self.it.len());
        for ((sym, tuple), &v) in &self.it {
            let mask = &self.masks[sym];
            let image: Tuple = tuple
                .iter()
                .zip(mask)
                .map(|(&e, &hit)| if hit { perm.apply(e) } else { e })
                .collect();
            let &w = self.it.get(&(sym.clone(), image))?;
            images.push((v, w));
        }
        images.sort_unstable();
        out.extend(images.into_iter().map(|(_, w)| w));
        Some(out)
    }

    /// DE restriction of a whole-graph vertex permutation.
    pub fn restrict(&self, vertex_perm: &[u32]) -> DomainPermutation {
        let mut map = vec![0 as ElemId; self.de.len()];
        for (v, &e) in self.de.iter().enumerate() {
            map[e as usize] = self.de[vertex_perm[v] as usize];
        }
        DomainPermutation::from_map(map).expect("automorphism restricts to a bijection")
    }
}

/// Builds the graph with the two size reductions: AP indices above every
/// interpreted A-position are dropped, and symbols without an interpreted
/// A-position contribute no tuple vertices. Both kinds of vertex would be
/// fixed by every automorphism, so the group is unchanged.
pub fn build_dpg(i: &Structure, a: &ArgPosSet) -> (ColoredGraph, DpgMapping) {
    build(i, a, true)
}

/// Builds the graph by the book: AP indices 0 through the maximum
/// interpreted width, and a tuple vertex for every interpreted tuple.
pub fn build_dpg_full(i: &Structure, a: &ArgPosSet) -> (ColoredGraph, DpgMapping) {
    build(i, a, false)
}

fn build(i: &Structure, a: &ArgPosSet, prune: bool) -> (ColoredGraph, DpgMapping) {
    let dom = i.domain();
    let n = dom.size();

    // Stored tuples per symbol: relations keep their tuples, function
    // entries append the output value, so slot j of a stored tuple is
    // argument position j+1 for relations and, for a function of arity w,
    // positions 1..=w then 0.
    let mut symbols: Vec<(String, Vec<Tuple>, Vec<usize>)> = Vec::new();
    for (name, rel) in i.rels() {
        let width = rel.iter().next().map(Vec::len).unwrap_or(0);
        let tuples: Vec<Tuple> = rel.iter().cloned().collect();
        symbols.push((name.to_string(), tuples, (1..=width).collect()));
    }
    for (name, graph) in i.funcs() {
        let width = graph.keys().next().map(Vec::len).unwrap_or(0);
        let tuples: Vec<Tuple> = graph
            .iter()
            .map(|(t, &r)| {
                let mut full = t.clone();
                full.push(r);
                full
            })
            .collect();
        let mut positions: Vec<usize> = (1..=width).collect();
        positions.push(0);
        symbols.push((name.to_string(), tuples, positions));
    }
    symbols.sort_by(|x, y| x.0.cmp(&y.0));

    let max_index = |only_a: bool| -> usize {
        symbols
            .iter()
            .flat_map(|(name, _, positions)| {
                positions
                    .iter()
                    .filter(move |&&ix| !only_a || a.contains(&ArgPos::new(name, ix)))
            })
            .copied()
            .max()
            .unwrap_or(0)
    };
    let m = max_index(prune);

    let mut g = ColoredGraph { colors: Vec::new(), layers: Vec::new(), labels: Vec::new(), adj: Vec::new() };
    let mut mapping = DpgMapping {
        de: dom.elems_ordered().to_vec(),
        ap: Vec::new(),
        it: BTreeMap::new(),
        masks: BTreeMap::new(),
    };

    for &e in dom.elems_ordered() {
        g.add_vertex(0, Layer::De, dom.name(e).to_string());
    }
    for &e in dom.elems_ordered() {
        for ix in 0..=m as u32 {
            let v = g.add_vertex(1 + ix, Layer::Ap, format!("{}|{}", dom.name(e), ix));
            mapping.ap.push((e, ix));
            g.add_edge(dom.rank(e), v);
        }
    }

    let ap_vertex = |e: ElemId, ix: usize| n as u32 + dom.rank(e) * (m as u32 + 1) + ix as u32;
    let mut it_colors: BTreeMap<(String, Tuple), u32> = BTreeMap::new();
    for (name, mut tuples, positions) in symbols {
        let mask: Vec<bool> =
            positions.iter().map(|&ix| a.contains(&ArgPos::new(&name, ix))).collect();
        if prune && mask.iter().all(|&h| !h) {
            continue;
        }
        tuples.sort_by(|x, y| dom.cmp_tuples(x, y));
        for tuple in tuples {
            let fixed: Tuple = tuple
                .iter()
                .zip(&mask)
                .filter(|&(_, &hit)| !hit)
                .map(|(&e, _)| e)
                .collect();
            let next = (2 + m + it_colors.len()) as u32;
            let color = *it_colors.entry((name.clone(), fixed)).or_insert(next);
            let label = {
                let names: Vec<&str> = tuple.iter().map(|&e| dom.name(e)).collect();
                format!("{}({})", name, names.join(","))
            };
            let v = g.add_vertex(color, Layer::It, label);
            for (slot, &ix) in positions.iter().enumerate() {
                if mask[slot] {
                    g.add_edge(ap_vertex(tuple[slot], ix), v);
                }
            }
            mapping.it.insert((name.clone(), tuple), v);
        }
        mapping.masks.insert(name, mask);
    }
    g.freeze();
    (g, mapping)
}
