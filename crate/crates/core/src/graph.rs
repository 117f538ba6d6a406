//! Undirected agent graphs with bitmask adjacency.

use thiserror::Error;

use crate::agents::{AgentSet, MAX_AGENTS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have between 1 and {MAX_AGENTS} agents, got {0}")]
    BadAgentCount(usize),
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    OutOfRange(usize, usize, usize),
}

/// A simple undirected graph over agents `0..n`.
///
/// Immutable after construction. Edges are stored canonically as `(lo, hi)`
/// pairs in ascending order; duplicate input pairs collapse to one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<AgentSet>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_AGENTS {
            return Err(GraphError::BadAgentCount(n));
        }
        let mut adj = vec![AgentSet::EMPTY; n];
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u, v));
            }
            adj[u].insert(v);
            adj[v].insert(u);
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Graph {
            n,
            adj,
            edges: canon,
        })
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges)
    }

    /// Cycle on `n` agents; for `n < 3` this is the path.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Graph::new(n, &edges)
    }

    /// Star with agent 0 at the center.
    pub fn star(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Graph::new(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Graph::new(n, &edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn agents(&self) -> AgentSet {
        AgentSet::full(self.n)
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, agent: usize) -> AgentSet {
        self.adj[agent]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    /// Union of the neighborhoods of every member of `set` (may overlap `set`).
    #[inline]
    pub fn neighborhood(&self, set: AgentSet) -> AgentSet {
        set.iter().fold(AgentSet::EMPTY, |acc, a| acc | self.adj[a])
    }

    /// Agents of `within` reachable from `start` through `within`.
    ///
    /// `start` itself is always part of the result.
    pub fn reach(&self, start: AgentSet, within: AgentSet) -> AgentSet {
        let mut seen = start;
        let mut frontier = start;
        while !frontier.is_empty() {
            let next = self.neighborhood(frontier) & within & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    /// Whether `set` induces a connected subgraph. Empty sets and singletons do.
    pub fn is_connected(&self, set: AgentSet) -> bool {
        match set.first() {
            None => true,
            Some(a) => self.reach(AgentSet::singleton(a), set) == set,
        }
    }

    /// Maximal connected blocks of the subgraph induced by `set`, ordered by
    /// lowest member.
    pub fn components(&self, set: AgentSet) -> Components<'_> {
        Components {
            graph: self,
            rest: set,
        }
    }

    /// Whether the whole graph is connected.
    pub fn is_connected_graph(&self) -> bool {
        self.is_connected(self.agents())
    }
}

/// Iterator returned by [`Graph::components`].
pub struct Components<'g> {
    graph: &'g Graph,
    rest: AgentSet,
}

impl Iterator for Components<'_> {
    type Item = AgentSet;

    fn next(&mut self) -> Option<AgentSet> {
        let a = self.rest.first()?;
        let block = self.graph.reach(AgentSet::singleton(a), self.rest);
        self.rest -= block;
        Some(block)
    }
}
