//! Constrained enumeration of connected agent subsets.
//!
//! [`ConnectedSubsets`] yields every nonempty `S` with
//! `required ⊆ S ⊆ ground ∖ forbidden` that induces a connected subgraph,
//! each exactly once. It grows a connected set one neighbor at a time and
//! carries an excluded set: once the branch that adds neighbor `v` has been
//! explored, `v` is excluded from every later sibling branch, so no set is
//! reachable along two different branches.
//!
//! When `required` is empty, the outer loop seeds the expansion at every
//! allowed agent `u` with all allowed agents below `u` excluded, which
//! enumerates the sets whose lowest member is `u`.

use crate::agents::AgentSet;
use crate::graph::Graph;

struct Frame {
    set: AgentSet,
    excluded: AgentSet,
    pending: AgentSet,
    neighborhood: AgentSet,
}

/// Streaming enumerator; see the module docs.
pub struct ConnectedSubsets<'g> {
    graph: &'g Graph,
    allowed: AgentSet,
    required: AgentSet,
    seeds: AgentSet,
    stack: Vec<Frame>,
}

impl<'g> ConnectedSubsets<'g> {
    pub fn new(
        graph: &'g Graph,
        ground: AgentSet,
        required: AgentSet,
        forbidden: AgentSet,
    ) -> Self {
        let allowed = ground & graph.agents() & !forbidden;
        let seeds = if !required.is_subset(allowed) {
            AgentSet::EMPTY
        } else if required.is_empty() {
            allowed
        } else {
            AgentSet::singleton(required.first().unwrap())
        };
        ConnectedSubsets {
            graph,
            allowed,
            required,
            seeds,
            stack: Vec::with_capacity(graph.n()),
        }
    }

    /// All connected subsets of `ground`.
    pub fn all(graph: &'g Graph, ground: AgentSet) -> Self {
        Self::new(graph, ground, AgentSet::EMPTY, AgentSet::EMPTY)
    }

    /// Connected subsets of `ground` that contain `required`.
    pub fn containing(graph: &'g Graph, ground: AgentSet, required: AgentSet) -> Self {
        Self::new(graph, ground, required, AgentSet::EMPTY)
    }

    /// A partial set can still grow into an emitted one only if every required
    /// agent is reachable from it without passing through excluded agents.
    fn viable(&self, set: AgentSet, excluded: AgentSet) -> bool {
        if self.required.is_subset(set) {
            return true;
        }
        if !self.required.is_disjoint(excluded) {
            return false;
        }
        let reach = self.graph.reach(set, self.allowed - excluded);
        self.required.is_subset(reach)
    }

    fn push(&mut self, set: AgentSet, excluded: AgentSet, neighborhood: AgentSet) {
        let pending = neighborhood & self.allowed & !set & !excluded;
        self.stack.push(Frame {
            set,
            excluded,
            pending,
            neighborhood,
        });
    }
}

impl Iterator for ConnectedSubsets<'_> {
    type Item = AgentSet;

    fn next(&mut self) -> Option<AgentSet> {
        loop {
            if let Some(top) = self.stack.last_mut() {
                let Some(v) = top.pending.pop_first() else {
                    self.stack.pop();
                    continue;
                };
                let set = top.set.with(v);
                let excluded = top.excluded;
                let neighborhood = top.neighborhood | self.graph.neighbors(v);
                top.excluded.insert(v);
                if !self.viable(set, excluded) {
                    continue;
                }
                self.push(set, excluded, neighborhood);
                if self.required.is_subset(set) {
                    return Some(set);
                }
                continue;
            }

            let seed = self.seeds.pop_first()?;
            let set = AgentSet::singleton(seed);
            let excluded = if self.required.is_empty() {
                self.allowed & AgentSet::below(seed)
            } else {
                AgentSet::EMPTY
            };
            if !self.viable(set, excluded) {
                continue;
            }
            self.push(set, excluded, self.graph.neighbors(seed));
            if self.required.is_subset(set) {
                return Some(set);
            }
        }
    }
}

/// Reference enumerator: filters every subset of `ground ∖ forbidden`.
///
/// Exponential in `|ground|`; intended for differential testing.
pub fn connected_subsets_by_filter(
    graph: &Graph,
    ground: AgentSet,
    required: AgentSet,
    forbidden: AgentSet,
) -> Vec<AgentSet> {
    let allowed = ground & graph.agents() & !forbidden;
    allowed
        .subsets()
        .filter(|s| !s.is_empty() && required.is_subset(*s) && graph.is_connected(*s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> AgentSet {
        xs.iter().copied().collect()
    }

    fn four_cycle() -> Graph {
        Graph::new(4, &[(0, 1), (0, 3), (2, 1), (2, 3)]).unwrap()
    }

    fn sorted(mut v: Vec<AgentSet>) -> Vec<AgentSet> {
        v.sort();
        v
    }

    #[test]
    fn four_cycle_has_thirteen_connected_subsets() {
        let g = four_cycle();
        let all: Vec<_> = ConnectedSubsets::all(&g, g.agents()).collect();
        assert_eq!(all.len(), 13);
        assert_eq!(
            sorted(all),
            sorted(connected_subsets_by_filter(
                &g,
                g.agents(),
                AgentSet::EMPTY,
                AgentSet::EMPTY
            ))
        );
    }

    #[test]
    fn required_pair_across_the_cycle() {
        let g = four_cycle();
        let got = sorted(ConnectedSubsets::containing(&g, g.agents(), set(&[0, 2])).collect());
        assert_eq!(
            got,
            sorted(vec![set(&[0, 1, 2]), set(&[0, 2, 3]), set(&[0, 1, 2, 3])])
        );
    }

    #[test]
    fn singleton_ground() {
        let g = four_cycle();
        let got: Vec<_> = ConnectedSubsets::containing(&g, set(&[0]), set(&[0])).collect();
        assert_eq!(got, vec![set(&[0])]);
    }

    #[test]
    fn forbidden_is_subtracted_from_ground() {
        let g = four_cycle();
        // Forbidding 1 and 3 disconnects 0 from 2.
        let got: Vec<_> =
            ConnectedSubsets::new(&g, g.agents(), set(&[0, 2]), set(&[1, 3])).collect();
        assert!(got.is_empty());
        let got =
            sorted(ConnectedSubsets::new(&g, g.agents(), AgentSet::EMPTY, set(&[1])).collect());
        assert_eq!(
            got,
            sorted(connected_subsets_by_filter(
                &g,
                g.agents(),
                AgentSet::EMPTY,
                set(&[1])
            ))
        );
    }

    #[test]
    fn required_outside_ground_yields_nothing() {
        let g = four_cycle();
        assert_eq!(
            ConnectedSubsets::containing(&g, set(&[0, 1]), set(&[2])).count(),
            0
        );
    }

    #[test]
    fn empty_ground_yields_nothing() {
        let g = four_cycle();
        assert_eq!(ConnectedSubsets::all(&g, AgentSet::EMPTY).count(), 0);
    }
}
