//! Branch and bound over the edge-contraction tree.
//!
//! A node is a feasible structure plus a marking of the edges between its
//! blocks as solid or dashed. The root is all singletons with every edge
//! solid. Child `k` contracts the `k`-th solid edge after dashing the solid
//! edges before it, and a dashed edge stays dashed through later merges, so
//! two blocks joined by a dashed edge never end up together. Every feasible
//! structure is reached exactly once.

use std::time::Instant;

use crate::agents::AgentSet;
use crate::game::{Game, Partition};
use crate::graph::Graph;

use super::track::{IncumbentSink, Tracker};
use super::{validate, Clock, SearchBound, SolveError, SolveOptions, SolverResult, Stats, Status};

#[derive(Clone, Debug)]
struct Node {
    /// Sorted by lowest agent, so block order and coalition id order agree.
    blocks: Vec<AgentSet>,
    /// `dashed[i]` has bit `j` set when the edge between blocks `i` and `j`
    /// is dashed.
    dashed: Vec<u64>,
}

impl Node {
    fn root(graph: &Graph) -> Self {
        Node {
            blocks: graph.agents().iter().map(AgentSet::singleton).collect(),
            dashed: vec![0; graph.n()],
        }
    }

    /// Solid edges `(i, j)`, `i < j`, in lexicographic order.
    fn solid_edges(&self, graph: &Graph) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &b) in self.blocks.iter().enumerate() {
            let reach = graph.neighborhood(b);
            for j in i + 1..self.blocks.len() {
                if !reach.is_disjoint(self.blocks[j]) && self.dashed[i] & (1 << j) == 0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Unions of blocks connected through solid edges.
    fn merged(&self, solid: &[(usize, usize)]) -> Vec<AgentSet> {
        let m = self.blocks.len();
        let mut root: Vec<usize> = (0..m).collect();
        fn find(root: &mut [usize], mut x: usize) -> usize {
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        for &(i, j) in solid {
            let (a, b) = (find(&mut root, i), find(&mut root, j));
            if a != b {
                root[a.max(b)] = a.min(b);
            }
        }
        let mut acc = vec![AgentSet::EMPTY; m];
        for i in 0..m {
            let r = find(&mut root, i);
            acc[r] |= self.blocks[i];
        }
        acc.into_iter().filter(|s| !s.is_empty()).collect()
    }

    /// Contracts `solid[k]` after dashing `solid[..k]`.
    fn child(&self, solid: &[(usize, usize)], k: usize) -> Node {
        let mut dashed = self.dashed.clone();
        for &(a, b) in &solid[..k] {
            dashed[a] |= 1 << b;
            dashed[b] |= 1 << a;
        }
        let (i, j) = solid[k];
        let map = |x: usize| match x.cmp(&j) {
            std::cmp::Ordering::Less => x,
            std::cmp::Ordering::Equal => i,
            std::cmp::Ordering::Greater => x - 1,
        };
        let m = self.blocks.len();
        let mut blocks = Vec::with_capacity(m - 1);
        let mut out = vec![0u64; m - 1];
        for x in 0..m {
            if x == j {
                continue;
            }
            blocks.push(if x == i {
                self.blocks[i] | self.blocks[j]
            } else {
                self.blocks[x]
            });
        }
        for x in 0..m {
            let mut bits = dashed[x];
            while bits != 0 {
                let y = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out[map(x)] |= 1 << map(y);
            }
        }
        out[i] &= !(1 << i);
        Node {
            blocks,
            dashed: out,
        }
    }
}

struct Search<'a> {
    game: &'a Game,
    graph: &'a Graph,
    bound: &'a dyn SearchBound,
    tracker: Tracker<'a>,
    on_structure: Option<super::StructureHook<'a>>,
    stats: Stats,
    clock: Clock,
}

impl Search<'_> {
    /// `false` once the deadline has passed.
    fn visit(&mut self, node: &Node) -> bool {
        if self.clock.expired() {
            return false;
        }
        self.stats.structures_visited += 1;
        if let Some(hook) = self.on_structure.as_mut() {
            hook(&node.blocks);
        }
        let value = self.game.partition_value(&node.blocks);
        self.tracker.offer(value, &mut || node.blocks.clone());

        let solid = node.solid_edges(self.graph);
        if solid.is_empty() {
            return true;
        }
        if let Some(ub) = self
            .bound
            .cfss(self.game, &node.blocks, &node.merged(&solid))
        {
            if !self.tracker.improves(ub) {
                self.stats.nodes_pruned += 1;
                return true;
            }
        }
        for k in 0..solid.len() {
            self.stats.nodes_expanded += 1;
            if !self.visit(&node.child(&solid, k)) {
                return false;
            }
        }
        true
    }
}

/// Edge-contraction branch and bound. Anytime: the incumbent starts at the
/// all-singletons structure.
pub fn cfss(
    game: &Game,
    graph: &Graph,
    opts: SolveOptions<'_>,
) -> Result<SolverResult, SolveError> {
    validate(game, graph, None)?;
    let start = Instant::now();
    let mut search = Search {
        game,
        graph,
        bound: opts.bound,
        tracker: Tracker::new(start, opts.on_incumbent),
        on_structure: opts.on_structure,
        stats: Stats::default(),
        clock: Clock::new(opts.deadline),
    };
    let root = Node::root(graph);
    search.stats.nodes_expanded += 1;
    let finished = search.visit(&root);
    if !finished && search.tracker.best_value().is_none() {
        let blocks = root.blocks.clone();
        search
            .tracker
            .offer(game.partition_value(&blocks), &mut || blocks.clone());
    }
    let stats = search.stats;
    let (best, trace) = search.tracker.into_parts();
    let (best_value, blocks) = best.expect("root is always offered");
    Ok(SolverResult {
        best: Partition::from_blocks_unchecked(blocks),
        best_value,
        status: if finished {
            Status::Optimal
        } else {
            Status::Interrupted
        },
        stats,
        trace,
        elapsed: start.elapsed(),
        table: None,
        frontier: None,
    })
}

/// A node of the unpruned contraction tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionNode {
    pub blocks: Vec<AgentSet>,
    /// Blocks joined through solid edges.
    pub merged: Vec<AgentSet>,
    /// Index of the parent; parents precede children.
    pub parent: Option<usize>,
}

/// The whole contraction tree in depth-first preorder.
pub fn expand_contraction_tree(graph: &Graph) -> Vec<ContractionNode> {
    fn walk(graph: &Graph, node: &Node, parent: Option<usize>, out: &mut Vec<ContractionNode>) {
        let solid = node.solid_edges(graph);
        let me = out.len();
        out.push(ContractionNode {
            blocks: node.blocks.clone(),
            merged: node.merged(&solid),
            parent,
        });
        for k in 0..solid.len() {
            walk(graph, &node.child(&solid, k), Some(me), out);
        }
    }
    let mut out = Vec::new();
    walk(graph, &Node::root(graph), None, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{enumerate_feasible_structures, SuperSubBound};

    fn visits(g: &Graph) -> Vec<Vec<AgentSet>> {
        let game = Game::from_table(g.n(), vec![0; (1 << g.n()) - 1]).unwrap();
        let mut seen = Vec::new();
        let opts = SolveOptions::default().on_structure(|b| seen.push(b.to_vec()));
        cfss(&game, g, opts).unwrap();
        seen
    }

    #[test]
    fn four_cycle_visits_twelve() {
        let g = Graph::new(4, &[(0, 1), (0, 3), (2, 1), (2, 3)]).unwrap();
        let mut seen = visits(&g);
        assert_eq!(seen.len(), 12);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn triangle_visits_bell_three() {
        assert_eq!(visits(&Graph::complete(3).unwrap()).len(), 5);
    }

    #[test]
    fn tree_matches_enumerator() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (1, 4)]).unwrap();
        let mut tree: Vec<_> = expand_contraction_tree(&g)
            .into_iter()
            .map(|mut n| {
                n.blocks.sort();
                n.blocks
            })
            .collect();
        let mut all: Vec<_> = enumerate_feasible_structures(&g)
            .map(|mut b| {
                b.sort();
                b
            })
            .collect();
        tree.sort();
        all.sort();
        assert_eq!(tree, all);
    }

    #[test]
    fn merged_dashes_survive_contraction() {
        // Triangle: child 2 contracts (0,2) with (0,1) dashed; the merged
        // block's edge to 1 must be dashed, leaving no solid edge.
        let g = Graph::complete(3).unwrap();
        let root = Node::root(&g);
        let solid = root.solid_edges(&g);
        assert_eq!(solid, vec![(0, 1), (0, 2), (1, 2)]);
        let c = root.child(&solid, 1);
        assert_eq!(c.blocks.len(), 2);
        assert!(c.solid_edges(&g).is_empty());
        assert_eq!(c.merged(&[]), c.blocks);
    }

    #[test]
    fn bound_prunes_subadditive_game() {
        let g = Graph::complete(6).unwrap();
        let game = Game::supersub(vec![0; 6], 3).unwrap();
        let r = cfss(
            &game,
            &g,
            SolveOptions::default().with_bound(&SuperSubBound),
        )
        .unwrap();
        assert_eq!(r.best_value, -18);
        assert_eq!(r.stats.structures_visited, 1);
        assert_eq!(r.stats.nodes_pruned, 1);
    }

    #[test]
    fn interrupted_keeps_root() {
        let g = Graph::complete(6).unwrap();
        let game = Game::supersub(vec![1; 6], 0).unwrap();
        let r = cfss(
            &game,
            &g,
            SolveOptions::default().with_deadline(Instant::now()),
        )
        .unwrap();
        assert_eq!(r.status, Status::Interrupted);
        assert_eq!(r.best.len(), 6);
    }
}
