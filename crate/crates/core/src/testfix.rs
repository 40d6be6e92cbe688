//! Shared fixtures for unit tests.

use std::sync::Arc;

use crate::fo::{parse_problem, FuncGraph, Problem, Structure};

/// Four-vertex directed cycle, three colors; the running example used
/// throughout the crate's tests.
pub const GRAPH_COLORING: &str = "
vocab {
  pred V/1 input
  pred C/1 input
  pred Edge/2 input
  func Color/1 output
}
domain = { t u v w r g b }
theory {
  ! x y: Edge(x, y) => Color(x) ~= Color(y).
  ! x y: Edge(x, y) => V(x) & V(y).
  ! x: C(Color(x)).
}
structure {
  V = { t u v w }
  C = { r g b }
  Edge = { (t, u) (u, v) (v, w) (w, t) }
}
";

pub fn coloring() -> Problem {
    parse_problem(GRAPH_COLORING).unwrap()
}

/// The intended model: t->r, u->g, v->b, w->g, color elements fixed.
pub fn coloring_output(p: &Problem) -> Structure {
    let d = p.domain();
    let pairs = [("t", "r"), ("u", "g"), ("v", "b"), ("w", "g"), ("r", "r"), ("g", "g"), ("b", "b")];
    let mut g = FuncGraph::new();
    for (x, c) in pairs {
        g.insert(vec![d.id(x).unwrap()], d.id(c).unwrap());
    }
    let mut s = Structure::new(d.clone());
    s.set_func("Color", Arc::new(g)).unwrap();
    s
}
