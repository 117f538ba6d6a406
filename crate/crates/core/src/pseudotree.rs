//! Pseudotrees and the breadth-first agent order `b_1, .., b_n`.
//!
//! A pseudotree is a rooted spanning tree in which every graph edge joins an
//! ancestor and a descendant. Any depth-first spanning tree has this property
//! (a DFS never leaves a cross edge behind), so that is how we build one:
//! DFS from the root, neighbors in ascending index order.
//!
//! The breadth-first order sorts agents by `(depth, DFS discovery time)`,
//! which is a genuine BFS of the tree: siblings' subtrees are discovered
//! one after another, so children of an earlier parent keep coming first.

use thiserror::Error;

use crate::agents::AgentSet;
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PseudotreeError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("agent {0} is not part of the pseudotree")]
    UnknownAgent(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pseudotree {
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    /// `order[i - 1] = b_i`.
    order: Vec<usize>,
    /// `position[a] = i` with `b_i = a` (1-based).
    position: Vec<usize>,
    /// `prefix[k] = {b_1, .., b_k}`.
    prefix: Vec<AgentSet>,
}

impl Pseudotree {
    pub fn build(graph: &Graph, root: usize) -> Result<Self, PseudotreeError> {
        let n = graph.n();
        if root >= n {
            return Err(PseudotreeError::UnknownAgent(root));
        }
        if !graph.is_connected_graph() {
            return Err(PseudotreeError::Disconnected);
        }

        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut discovered = vec![usize::MAX; n];
        let mut clock = 0;

        // Iterative DFS; each stack entry keeps the neighbors still to try.
        discovered[root] = clock;
        clock += 1;
        let mut stack = vec![(root, graph.neighbors(root))];
        while let Some((u, pending)) = stack.last_mut() {
            let u = *u;
            let Some(v) = pending.pop_first() else {
                stack.pop();
                continue;
            };
            if discovered[v] != usize::MAX {
                continue;
            }
            discovered[v] = clock;
            clock += 1;
            parent[v] = Some(u);
            depth[v] = depth[u] + 1;
            stack.push((v, graph.neighbors(v)));
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| (depth[a], discovered[a]));
        let mut position = vec![0; n];
        for (i, &a) in order.iter().enumerate() {
            position[a] = i + 1;
        }
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = AgentSet::EMPTY;
        prefix.push(acc);
        for &a in &order {
            acc.insert(a);
            prefix.push(acc);
        }

        Ok(Pseudotree {
            root,
            parent,
            depth,
            order,
            position,
            prefix,
        })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, agent: usize) -> Option<usize> {
        self.parent[agent]
    }

    pub fn depth(&self, agent: usize) -> usize {
        self.depth[agent]
    }

    /// The breadth-first order `b_1, .., b_n`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `b_i` for a 1-based position `i`.
    #[inline]
    pub fn agent_at(&self, i: usize) -> usize {
        self.order[i - 1]
    }

    /// The 1-based position `i` with `b_i = agent`.
    pub fn breadth_first_position(&self, agent: usize) -> Result<usize, PseudotreeError> {
        self.position
            .get(agent)
            .copied()
            .ok_or(PseudotreeError::UnknownAgent(agent))
    }

    #[inline]
    pub(crate) fn pos(&self, agent: usize) -> usize {
        self.position[agent]
    }

    /// `{b_1, .., b_k}`; `k = 0` gives the empty set.
    #[inline]
    pub fn prefix(&self, k: usize) -> AgentSet {
        self.prefix[k]
    }

    /// `{b_i, .., b_n}`.
    #[inline]
    pub fn suffix(&self, i: usize) -> AgentSet {
        self.prefix[self.n()] - self.prefix[i - 1]
    }

    /// The member of `set` earliest in the breadth-first order.
    pub fn first_in(&self, set: AgentSet) -> Option<usize> {
        set.iter().min_by_key(|&a| self.position[a])
    }

    pub fn is_ancestor(&self, ancestor: usize, mut agent: usize) -> bool {
        while let Some(p) = self.parent[agent] {
            if p == ancestor {
                return true;
            }
            agent = p;
        }
        false
    }

    /// Every tree edge is an edge of `graph`.
    pub fn is_spanning_tree_of(&self, graph: &Graph) -> bool {
        graph.n() == self.n()
            && (0..self.n()).all(|a| match self.parent[a] {
                Some(p) => graph.has_edge(p, a),
                None => a == self.root,
            })
    }

    /// Every graph edge joins an ancestor–descendant pair.
    pub fn satisfies_branch_property(&self, graph: &Graph) -> bool {
        graph
            .edges()
            .iter()
            .all(|&(u, v)| self.is_ancestor(u, v) || self.is_ancestor(v, u))
    }

    /// `order` is a layering of the tree: a bijection onto positions with
    /// depth non-decreasing along it, and parents strictly before children.
    pub fn is_breadth_first(&self) -> bool {
        let n = self.n();
        let mut seen = AgentSet::EMPTY;
        for (i, &a) in self.order.iter().enumerate() {
            if a >= n || seen.contains(a) || self.position[a] != i + 1 {
                return false;
            }
            seen.insert(a);
            if i > 0 && self.depth[self.order[i - 1]] > self.depth[a] {
                return false;
            }
            match self.parent[a] {
                None if a != self.root => return false,
                Some(p) if self.position[p] > i || self.depth[p] + 1 != self.depth[a] => {
                    return false
                }
                _ => {}
            }
        }
        seen.len() == n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A five-agent graph whose pseudotree rooted at a3 has the breadth-first
    /// order (a3, a1, a4, a2, a5). Agents renumbered from zero.
    fn five_agent_example() -> Graph {
        Graph::new(5, &[(2, 0), (2, 3), (0, 1), (3, 4), (2, 1)]).unwrap()
    }

    #[test]
    fn pinned_root_order() {
        let g = five_agent_example();
        let pt = Pseudotree::build(&g, 2).unwrap();
        assert_eq!(pt.order(), &[2, 0, 3, 1, 4]);
        assert_eq!(pt.breadth_first_position(2), Ok(1));
        assert_eq!(pt.breadth_first_position(1), Ok(4));
        assert_eq!(pt.agent_at(1), 2);
        assert_eq!(pt.agent_at(4), 1);
        assert!(pt.satisfies_branch_property(&g));
        assert!(pt.is_breadth_first());
    }

    #[test]
    fn single_agent() {
        let g = Graph::new(1, &[]).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        assert_eq!(pt.order(), &[0]);
        assert_eq!(pt.breadth_first_position(0), Ok(1));
        assert_eq!(pt.parent(0), None);
    }

    #[test]
    fn star_rooted_at_center() {
        let g = Graph::star(4).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        for leaf in 1..4 {
            assert_eq!(pt.parent(leaf), Some(0));
        }
        assert!(pt.satisfies_branch_property(&g));
    }

    #[test]
    fn errors() {
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        assert_eq!(Pseudotree::build(&g, 0), Err(PseudotreeError::Disconnected));
        let g = Graph::path(3).unwrap();
        assert_eq!(
            Pseudotree::build(&g, 3),
            Err(PseudotreeError::UnknownAgent(3))
        );
        let pt = Pseudotree::build(&g, 0).unwrap();
        assert_eq!(
            pt.breadth_first_position(7),
            Err(PseudotreeError::UnknownAgent(7))
        );
    }

    #[test]
    fn prefix_and_suffix() {
        let g = five_agent_example();
        let pt = Pseudotree::build(&g, 2).unwrap();
        assert_eq!(pt.prefix(0), AgentSet::EMPTY);
        assert_eq!(pt.prefix(2), [2, 0].into_iter().collect());
        assert_eq!(pt.suffix(4), [1, 4].into_iter().collect());
        assert_eq!(pt.suffix(1), g.agents());
        assert_eq!(pt.first_in([4, 3, 1].into_iter().collect()), Some(3));
    }

    #[test]
    fn cycle_has_back_edge_on_branch() {
        let g = Graph::cycle(6).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        // DFS along the cycle yields a path; the closing edge is a back edge.
        assert_eq!(pt.depth(5), 5);
        assert!(pt.is_ancestor(0, 5));
        assert!(pt.satisfies_branch_property(&g));
    }
}
