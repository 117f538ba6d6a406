//! With pruning off, the tree searches reach every feasible structure once.

use std::collections::HashSet;

use csg_core::random::{gnp_connected, rng};
use csg_core::solvers::{cfss, enumerate_feasible_structures, tsp};
use csg_core::{AgentSet, Game, Graph, Pseudotree, SolveOptions};

fn canonical(blocks: &[AgentSet]) -> Vec<AgentSet> {
    let mut b = blocks.to_vec();
    b.sort();
    b
}

fn check(g: &Graph) {
    let n = g.n();
    let game = Game::from_table(n, vec![0; (1 << n) - 1]).unwrap();
    let all: HashSet<_> = enumerate_feasible_structures(g)
        .map(|b| canonical(&b))
        .collect();

    let pt = Pseudotree::build(g, 0).unwrap();
    let mut visited = Vec::new();
    tsp(
        &game,
        g,
        &pt,
        SolveOptions::default().on_structure(|b| visited.push(canonical(b))),
    )
    .unwrap();
    let mut seen: HashSet<_> = visited.iter().cloned().collect();
    assert_eq!(seen.len(), visited.len(), "tsp repeated a structure");
    seen.insert(vec![g.agents()]);
    seen.insert(canonical(
        &g.agents()
            .iter()
            .map(AgentSet::singleton)
            .collect::<Vec<_>>(),
    ));
    assert_eq!(seen, all);

    let mut visited = Vec::new();
    cfss(
        &game,
        g,
        SolveOptions::default().on_structure(|b| visited.push(canonical(b))),
    )
    .unwrap();
    assert_eq!(visited.len(), all.len());
    assert_eq!(visited.into_iter().collect::<HashSet<_>>(), all);
}

#[test]
fn named_graphs() {
    let four_cycle = Graph::new(4, &[(0, 1), (0, 3), (2, 1), (2, 3)]).unwrap();
    assert_eq!(enumerate_feasible_structures(&four_cycle).count(), 12);
    assert_eq!(
        enumerate_feasible_structures(&Graph::complete(4).unwrap()).count(),
        15
    );
    for n in 1..=6 {
        for g in [
            Graph::path(n).unwrap(),
            Graph::cycle(n).unwrap(),
            Graph::star(n).unwrap(),
            Graph::complete(n).unwrap(),
        ] {
            check(&g);
        }
    }
    check(&four_cycle);
}

#[test]
fn random_graphs() {
    let mut r = rng(5);
    for n in 2..=7 {
        for p in [0.3, 0.6] {
            for _ in 0..5 {
                check(&gnp_connected(n, p, 1000, &mut r).unwrap());
            }
        }
    }
}
