//! Exhaustive enumeration of feasible coalition structures.

use std::time::Instant;

use crate::agents::AgentSet;
use crate::enumerate::ConnectedSubsets;
use crate::game::{Game, Partition};
use crate::graph::Graph;

use super::track::{IncumbentSink, Tracker};
use super::{Clock, SolveError, SolveOptions, SolverResult, Stats, Status};

/// Every partition of the agents into connected blocks, each exactly once.
///
/// Built by repeatedly choosing the connected block that contains the
/// lowest-index uncovered agent. Works on disconnected graphs too.
pub struct FeasibleStructures<'g> {
    graph: &'g Graph,
    stack: Vec<ConnectedSubsets<'g>>,
    blocks: Vec<AgentSet>,
    covered: Vec<AgentSet>,
}

impl<'g> FeasibleStructures<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let all = graph.agents();
        FeasibleStructures {
            graph,
            stack: vec![ConnectedSubsets::containing(
                graph,
                all,
                AgentSet::singleton(0),
            )],
            blocks: Vec::with_capacity(graph.n()),
            covered: vec![AgentSet::EMPTY],
        }
    }
}

impl Iterator for FeasibleStructures<'_> {
    type Item = Vec<AgentSet>;

    fn next(&mut self) -> Option<Vec<AgentSet>> {
        let all = self.graph.agents();
        loop {
            let depth = self.stack.len();
            let top = self.stack.last_mut()?;
            let Some(block) = top.next() else {
                self.stack.pop();
                self.covered.pop();
                continue;
            };
            self.blocks.truncate(depth - 1);
            self.blocks.push(block);
            let covered = self.covered[depth - 1] | block;
            if covered == all {
                return Some(self.blocks.clone());
            }
            let rest = all - covered;
            let anchor = AgentSet::singleton(rest.first().unwrap());
            self.covered.truncate(depth);
            self.covered.push(covered);
            self.stack
                .push(ConnectedSubsets::containing(self.graph, rest, anchor));
        }
    }
}

pub fn enumerate_feasible_structures(graph: &Graph) -> FeasibleStructures<'_> {
    FeasibleStructures::new(graph)
}

/// Exact optimum by scanning every feasible structure.
pub fn brute_force_best(
    game: &Game,
    graph: &Graph,
    opts: SolveOptions<'_>,
) -> Result<SolverResult, SolveError> {
    if game.n() != graph.n() {
        return Err(SolveError::SizeMismatch {
            game: game.n(),
            graph: graph.n(),
        });
    }
    if graph.n() > opts.oracle_cap {
        return Err(SolveError::OracleCap {
            n: graph.n(),
            cap: opts.oracle_cap,
        });
    }
    let start = Instant::now();
    let mut clock = Clock::new(opts.deadline);
    let mut tracker = Tracker::new(start, opts.on_incumbent);
    let mut stats = Stats::default();
    for blocks in enumerate_feasible_structures(graph) {
        if clock.expired() {
            return Err(SolveError::BudgetExhausted);
        }
        stats.structures_visited += 1;
        let value = game.partition_value(&blocks);
        tracker.offer(value, &mut || blocks.clone());
    }
    let (best, trace) = tracker.into_parts();
    let (best_value, blocks) = best.expect("every graph has at least one feasible structure");
    Ok(SolverResult {
        best: Partition::from_blocks_unchecked(blocks),
        best_value,
        status: Status::Optimal,
        stats,
        trace,
        elapsed: start.elapsed(),
        table: None,
        frontier: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(g: &Graph) -> usize {
        enumerate_feasible_structures(g).count()
    }

    #[test]
    fn four_cycle_has_twelve_structures() {
        let g = Graph::new(4, &[(0, 1), (0, 3), (2, 1), (2, 3)]).unwrap();
        assert_eq!(count(&g), 12);
    }

    #[test]
    fn complete_graphs_give_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate().skip(1) {
            assert_eq!(count(&Graph::complete(n).unwrap()), b, "n={n}");
        }
    }

    #[test]
    fn single_agent() {
        let g = Graph::new(1, &[]).unwrap();
        let all: Vec<_> = enumerate_feasible_structures(&g).collect();
        assert_eq!(all, vec![vec![AgentSet::singleton(0)]]);
    }

    #[test]
    fn disconnected_graph_works_per_component() {
        // Two disjoint edges: each component is {both} or {each alone}.
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(count(&g), 4);
    }

    #[test]
    fn oracle_cap() {
        let g = Graph::path(13).unwrap();
        let game = Game::supersub(vec![1; 13], 0).unwrap();
        assert_eq!(
            brute_force_best(&game, &g, SolveOptions::default()).unwrap_err(),
            SolveError::OracleCap { n: 13, cap: 12 }
        );
    }

    #[test]
    fn superadditive_optimum_is_grand_coalition() {
        let g = Graph::cycle(5).unwrap();
        let game = Game::supersub(vec![1, 2, 3, 4, 5], 0).unwrap();
        let r = brute_force_best(&game, &g, SolveOptions::default()).unwrap();
        assert_eq!(r.best.blocks(), &[g.agents()]);
        assert_eq!(r.best_value, game.value(g.agents()));
    }

    #[test]
    fn subadditive_optimum_is_all_singletons_value() {
        let g = Graph::star(5).unwrap();
        let game = Game::supersub(vec![0; 5], 3).unwrap();
        let r = brute_force_best(&game, &g, SolveOptions::default()).unwrap();
        assert_eq!(r.best_value, -15);
    }
}
