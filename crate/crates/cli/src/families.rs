//! Generated benchmark families: pigeonhole instances and cycle
//! coloring instances scaled from the four-vertex example.

use std::sync::Arc;

use mxsym_core::fo::{
    rename_apart, Domain, Formula, Problem, Relation, Structure, Symbol, SymbolIo, Term, Theory,
    Vocabulary,
};

/// `n` pigeons, `n - 1` holes, one placement function. Every pigeon
/// goes into some hole and no two pigeons share one, so the instance
/// is unsatisfiable by construction.
pub fn generate_pigeonhole(n: usize) -> Problem {
    assert!(n >= 2, "need at least two pigeons");
    let mut vocab = Vocabulary::new();
    vocab.declare(Symbol::pred("Pigeon", 1, SymbolIo::Input)).unwrap();
    vocab.declare(Symbol::pred("Hole", 1, SymbolIo::Input)).unwrap();
    vocab.declare(Symbol::func("Place", 1, SymbolIo::Output)).unwrap();

    let mut names: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    names.extend((1..n).map(|i| format!("h{i}")));
    let domain = Domain::new(names).unwrap();
    let pigeons: Relation = (0..n as u32).map(|e| vec![e]).collect();
    let holes: Relation = (n as u32..(2 * n - 1) as u32).map(|e| vec![e]).collect();
    let mut input = Structure::new(domain);
    input.set_rel("Pigeon", Arc::new(pigeons)).unwrap();
    input.set_rel("Hole", Arc::new(holes)).unwrap();

    let x = || Term::var("x");
    let y = || Term::var("y");
    let place = |t| Term::app("Place", vec![t]);
    let placed = Formula::forall(
        "x",
        Formula::implies(
            Formula::pred("Pigeon", vec![x()]),
            Formula::pred("Hole", vec![place(x())]),
        ),
    );
    let exclusive = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::implies(
                Formula::and(
                    Formula::pred("Pigeon", vec![x()]),
                    Formula::and(
                        Formula::pred("Pigeon", vec![y()]),
                        Formula::not(Formula::Eq(x(), y())),
                    ),
                ),
                Formula::not(Formula::Eq(place(x()), place(y()))),
            ),
        ),
    );
    let theory = rename_apart(&Theory::new(vec![placed, exclusive]));
    Problem { vocab, theory, input }
}

/// Proper coloring of a directed `n`-cycle with `k` colors; the
/// running example is `color_cycle(4, 3)` up to element names.
pub fn color_cycle(n: usize, k: usize) -> Problem {
    assert!(n >= 2 && k >= 1, "need a cycle and at least one color");
    let mut vocab = Vocabulary::new();
    vocab.declare(Symbol::pred("V", 1, SymbolIo::Input)).unwrap();
    vocab.declare(Symbol::pred("C", 1, SymbolIo::Input)).unwrap();
    vocab.declare(Symbol::pred("Edge", 2, SymbolIo::Input)).unwrap();
    vocab.declare(Symbol::func("Color", 1, SymbolIo::Output)).unwrap();

    let mut names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    names.extend((1..=k).map(|i| format!("c{i}")));
    let domain = Domain::new(names).unwrap();
    let vertices: Relation = (0..n as u32).map(|e| vec![e]).collect();
    let colors: Relation = (n as u32..(n + k) as u32).map(|e| vec![e]).collect();
    let edges: Relation = (0..n as u32).map(|i| vec![i, (i + 1) % n as u32]).collect();
    let mut input = Structure::new(domain);
    input.set_rel("V", Arc::new(vertices)).unwrap();
    input.set_rel("C", Arc::new(colors)).unwrap();
    input.set_rel("Edge", Arc::new(edges)).unwrap();

    let x = || Term::var("x");
    let y = || Term::var("y");
    let color = |t| Term::app("Color", vec![t]);
    let proper = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::implies(
                Formula::pred("Edge", vec![x(), y()]),
                Formula::not(Formula::Eq(color(x()), color(y()))),
            ),
        ),
    );
    let edges_on_vertices = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::implies(
                Formula::pred("Edge", vec![x(), y()]),
                Formula::and(Formula::pred("V", vec![x()]), Formula::pred("V", vec![y()])),
            ),
        ),
    );
    let colors_are_colors = Formula::forall("x", Formula::pred("C", vec![color(x())]));
    let theory = rename_apart(&Theory::new(vec![proper, edges_on_vertices, colors_are_colors]));
    Problem { vocab, theory, input }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mxsym_core::{ground_theory, sat_solve, SolverStatus};

    #[test]
    fn the_smallest_pigeonhole_is_unsat() {
        let p = generate_pigeonhole(2);
        assert_eq!(p.domain().size(), 3);
        let (cnf, _) = ground_theory(&p).unwrap();
        assert_eq!(sat_solve(&cnf).status, SolverStatus::Unsat);
    }

    #[test]
    fn small_cycles_color_like_the_running_example() {
        let p = color_cycle(4, 3);
        let (cnf, cat) = ground_theory(&p).unwrap();
        assert_eq!(cat.len(), 49);
        assert_eq!(sat_solve(&cnf).status, SolverStatus::Sat);
        let odd = color_cycle(3, 2);
        let (cnf, _) = ground_theory(&odd).unwrap();
        assert_eq!(sat_solve(&cnf).status, SolverStatus::Unsat);
    }
}
