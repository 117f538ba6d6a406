//! Depth-first tree search over partial partitions, with branch and bound.
//!
//! Stage `k` (for `b_2, .., b_n`) seeds the search with every connected
//! coalition containing `b_1, .., b_{k-1}` but not `b_k`. From a partial
//! partition the next block is always the one holding `a†`, the earliest
//! uncovered agent in breadth-first order. Together with the two initial
//! structures this reaches every feasible structure exactly once.

use std::time::Instant;

use crate::agents::AgentSet;
use crate::enumerate::ConnectedSubsets;
use crate::game::{Game, Partition, Value};
use crate::graph::Graph;
use crate::pseudotree::Pseudotree;

use super::table::DpTable;
use super::track::{IncumbentSink, Tracker};
use super::{
    validate, Clock, SearchBound, SolveError, SolveOptions, SolverResult, Stats, Status,
    StructureHook,
};

/// Read access to a DP table that may still be filling up.
pub(crate) trait TableView {
    /// See [`DpTable::published_level`].
    fn published_level(&self) -> usize;

    fn read<R>(&self, f: impl FnOnce(&DpTable) -> R) -> R;
}

/// No table: the shortcut never applies.
pub(crate) struct NoTable;

impl TableView for NoTable {
    fn published_level(&self) -> usize {
        usize::MAX
    }

    fn read<R>(&self, _: impl FnOnce(&DpTable) -> R) -> R {
        unreachable!("published level is never reached")
    }
}

pub(crate) enum Halt {
    Expired,
    Stopped,
}

pub(crate) struct TreeSearch<'a, I, T> {
    pub game: &'a Game,
    pub graph: &'a Graph,
    pub pt: &'a Pseudotree,
    pub all: AgentSet,
    pub bound: &'a dyn SearchBound,
    pub incumbent: I,
    pub table: T,
    pub stats: Stats,
    pub clock: Clock,
    pub stop: &'a (dyn Fn() -> bool + Sync),
    pub on_structure: Option<StructureHook<'a>>,
    blocks: Vec<AgentSet>,
}

impl<'a, I: IncumbentSink, T: TableView> TreeSearch<'a, I, T> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        game: &'a Game,
        graph: &'a Graph,
        pt: &'a Pseudotree,
        bound: &'a dyn SearchBound,
        incumbent: I,
        table: T,
        clock: Clock,
        stop: &'a (dyn Fn() -> bool + Sync),
        on_structure: Option<StructureHook<'a>>,
    ) -> Self {
        TreeSearch {
            game,
            graph,
            pt,
            all: graph.agents(),
            bound,
            incumbent,
            table,
            stats: Stats::default(),
            clock,
            stop,
            on_structure,
            blocks: Vec::with_capacity(graph.n()),
        }
    }

    /// Offers `{A}` and the all-singletons structure, better one first.
    pub(crate) fn initialize(&mut self) {
        let whole = self.game.value(self.all);
        let singles: Vec<AgentSet> = self.all.iter().map(AgentSet::singleton).collect();
        let single_value = self.game.partition_value(&singles);
        let all = self.all;
        if whole > single_value {
            self.incumbent.offer(whole, &mut || vec![all]);
        } else {
            self.incumbent.offer(single_value, &mut || singles.clone());
        }
    }

    /// Seeds of stage `k`.
    pub(crate) fn stage_seeds(&self, k: usize) -> ConnectedSubsets<'a> {
        ConnectedSubsets::new(
            self.graph,
            self.all,
            self.pt.prefix(k - 1),
            AgentSet::singleton(self.pt.agent_at(k)),
        )
    }

    /// Searches everything below the seed `{c}`.
    pub(crate) fn run_seed(&mut self, c: AgentSet) -> Result<(), Halt> {
        self.stats.subsets_enumerated += 1;
        self.stats.nodes_expanded += 1;
        self.blocks.clear();
        self.blocks.push(c);
        let r = self.search(c, self.game.value(c));
        self.blocks.clear();
        r
    }

    fn search(&mut self, covered: AgentSet, value: Value) -> Result<(), Halt> {
        if self.clock.expired() {
            return Err(Halt::Expired);
        }
        if (self.stop)() {
            return Err(Halt::Stopped);
        }
        let remainder = self.all - covered;
        if remainder.is_empty() {
            self.stats.structures_visited += 1;
            if let Some(hook) = self.on_structure.as_mut() {
                hook(&self.blocks);
            }
            let blocks = &self.blocks;
            self.incumbent.offer(value, &mut || blocks.clone());
            return Ok(());
        }
        if self.shortcut(remainder, value) {
            return Ok(());
        }

        let anchor = self.pt.first_in(remainder).expect("remainder is nonempty");
        for c in ConnectedSubsets::containing(self.graph, remainder, AgentSet::singleton(anchor)) {
            self.stats.subsets_enumerated += 1;
            self.stats.nodes_expanded += 1;
            let child_value = value + self.game.value(c);
            let rest = remainder - c;
            let recurse = rest.is_empty()
                || match self.bound.tsp(self.game, child_value, rest) {
                    Some(ub) => self.incumbent.improves(ub),
                    None => true,
                };
            if !recurse {
                self.stats.nodes_pruned += 1;
                continue;
            }
            self.blocks.push(c);
            let r = self.search(covered | c, child_value);
            self.blocks.pop();
            r?;
        }
        Ok(())
    }

    /// Completes `remainder` from the table when every component is anchored
    /// at or below the published level. Returns whether the subtree is done.
    fn shortcut(&mut self, remainder: AgentSet, partial_value: Value) -> bool {
        let level = self.table.published_level();
        if level > self.pt.n() {
            return false;
        }
        let pt = self.pt;
        let graph = self.graph;
        let applicable = graph
            .components(remainder)
            .all(|t| pt.pos(pt.first_in(t).unwrap()) >= level);
        if !applicable {
            return false;
        }
        let blocks = &self.blocks;
        let incumbent = &mut self.incumbent;
        let outcome: Result<(), AgentSet> = self.table.read(|table| {
            let rest = table.completion_value(graph, remainder)?;
            let value = partial_value + rest;
            incumbent.offer(value, &mut || {
                let comps: Vec<AgentSet> = graph.components(remainder).collect();
                let mut out = blocks.clone();
                out.extend(
                    table
                        .reconstruct(graph, &comps)
                        .expect("entries of a complete level expand fully"),
                );
                out
            });
            Ok(())
        });
        match outcome {
            Ok(()) => {
                self.stats.shortcuts += 1;
                true
            }
            Err(missing) => {
                log::warn!("table completion guard fired: no entry for {missing} at published level {level}");
                self.stats.guard_fallbacks += 1;
                false
            }
        }
    }
}

fn never() -> bool {
    false
}

/// Tree search with branch and bound. Not anytime: an expired budget yields
/// [`SolveError::BudgetExhausted`].
pub fn tsp(
    game: &Game,
    graph: &Graph,
    pt: &Pseudotree,
    opts: SolveOptions<'_>,
) -> Result<SolverResult, SolveError> {
    validate(game, graph, Some(pt))?;
    let start = Instant::now();
    let tracker = Tracker::new(start, opts.on_incumbent);
    let mut search = TreeSearch::new(
        game,
        graph,
        pt,
        opts.bound,
        tracker,
        NoTable,
        Clock::new(opts.deadline),
        &never,
        opts.on_structure,
    );
    search.initialize();
    for k in 2..=graph.n() {
        for c in search.stage_seeds(k) {
            search
                .run_seed(c)
                .map_err(|_| SolveError::BudgetExhausted)?;
        }
    }
    let stats = search.stats;
    let (best, trace) = search.incumbent.into_parts();
    let (best_value, blocks) = best.expect("initialized");
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

/// A structure and its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incumbent {
    pub value: Value,
    pub blocks: Vec<AgentSet>,
}

/// The table has no entry for this remainder component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuardFailure(pub AgentSet);

/// Completes the partial partition `partial` optimally from `table`.
///
/// Every component `T` of the uncovered agents contributes `v*(T)`. If the
/// total beats `incumbent` strictly, the incumbent becomes `partial` plus the
/// expansion of those components. Returns whether it improved.
pub fn tsp_star_step(
    table: &DpTable,
    graph: &Graph,
    partial: &[AgentSet],
    partial_value: Value,
    incumbent: &mut Incumbent,
) -> Result<bool, GuardFailure> {
    let covered = partial.iter().fold(AgentSet::EMPTY, |acc, &b| acc | b);
    let remainder = graph.agents() - covered;
    let rest = table
        .completion_value(graph, remainder)
        .map_err(GuardFailure)?;
    let value = partial_value + rest;
    if value <= incumbent.value {
        return Ok(false);
    }
    let comps: Vec<AgentSet> = graph.components(remainder).collect();
    let expanded = table.reconstruct(graph, &comps).map_err(|e| match e {
        SolveError::MissingSubproblem(t) => GuardFailure(t),
        _ => unreachable!(),
    })?;
    let mut blocks = partial.to_vec();
    blocks.extend(expanded);
    *incumbent = Incumbent { value, blocks };
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{dype, SuperSubBound};

    #[test]
    fn path_of_two() {
        let g = Graph::path(2).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        let game = Game::from_table(2, vec![3, 4, 5]).unwrap();
        let r = tsp(&game, &g, &pt, SolveOptions::default()).unwrap();
        assert_eq!(r.best_value, 7);
        assert_eq!(r.best.len(), 2);
    }

    #[test]
    fn subadditive_prunes_everything_below_seeds() {
        let g = Graph::complete(6).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        let game = Game::supersub(vec![0; 6], 2).unwrap();
        let r = tsp(
            &game,
            &g,
            &pt,
            SolveOptions::default().with_bound(&SuperSubBound),
        )
        .unwrap();
        assert_eq!(r.best_value, -12);
        assert!(r.stats.nodes_pruned > 0);
    }

    #[test]
    fn visits_every_structure_once_without_pruning() {
        let g = Graph::new(4, &[(0, 1), (0, 3), (2, 1), (2, 3)]).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        let game = Game::from_table(4, vec![0; 15]).unwrap();
        let mut seen = Vec::new();
        let opts = SolveOptions::default().on_structure(|b| {
            let mut b = b.to_vec();
            b.sort();
            seen.push(b);
        });
        tsp(&game, &g, &pt, opts).unwrap();
        // Search reaches everything but {A}, which only initialization offers.
        assert_eq!(seen.len(), 11);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 11);
        assert!(!seen.contains(&vec![g.agents()]));
    }

    #[test]
    fn star_step_completes_from_table() {
        let g = Graph::path(3).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        let game = Game::from_table(3, vec![1, 1, 1, 1, 1, 5, 1]).unwrap();
        let table = dype(&game, &g, &pt, SolveOptions::default())
            .unwrap()
            .table
            .unwrap();
        let mut inc = Incumbent {
            value: 0,
            blocks: vec![],
        };
        let a0 = AgentSet::singleton(0);
        assert_eq!(tsp_star_step(&table, &g, &[a0], 1, &mut inc), Ok(true));
        assert_eq!(inc.value, 6);
        assert_eq!(inc.blocks.len(), 2);
        assert_eq!(tsp_star_step(&table, &g, &[a0], 1, &mut inc), Ok(false));
        let empty = DpTable::new(3);
        assert!(tsp_star_step(&empty, &g, &[a0], 1, &mut inc).is_err());
        // Nothing uncovered: the partial partition is the candidate.
        let all = [a0, AgentSet::singleton(1), AgentSet::singleton(2)];
        assert_eq!(tsp_star_step(&empty, &g, &all, 3, &mut inc), Ok(false));
    }
}
