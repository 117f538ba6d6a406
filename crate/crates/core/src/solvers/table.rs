//! The DP table shared by `dype`, `dype_star` and `d_tsp`.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use thiserror::Error;

use crate::agents::AgentSet;
use crate::enumerate::ConnectedSubsets;
use crate::game::{Game, Value};
use crate::graph::Graph;
use crate::pseudotree::Pseudotree;

use super::{completion_value, SolveError};

/// Multiplicative hash for bitmask keys.
#[derive(Default)]
pub(crate) struct MaskHasher(u64);

impl Hasher for MaskHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ b as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }

    fn write_u64(&mut self, i: u64) {
        self.0 = (i ^ (i >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

type MaskMap<V> = HashMap<AgentSet, V, BuildHasherDefault<MaskHasher>>;

/// `v*(C)` and the anchored block chosen for `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    pub v_star: Value,
    pub best_subset: AgentSet,
}

/// Solved subproblems keyed by coalition.
///
/// Entries for proper subsets are written once. The entry for the whole
/// agent set may be improved repeatedly by the anytime pass.
#[derive(Clone, Debug)]
pub struct DpTable {
    n: usize,
    entries: MaskMap<Entry>,
    published_level: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AuditError {
    #[error("entry {set}: best subset {best} is not a connected subset containing the anchor")]
    BadSubset { set: AgentSet, best: AgentSet },
    #[error("entry {set}: coalition is not connected")]
    Disconnected { set: AgentSet },
    #[error("entry {set}: referenced subproblem {missing} is missing")]
    Missing { set: AgentSet, missing: AgentSet },
    #[error("entry {set}: stored {stored}, recomputed {recomputed}")]
    Inconsistent {
        set: AgentSet,
        stored: Value,
        recomputed: Value,
    },
    #[error("entry {set}: split {split} is worth {value} > stored {stored}")]
    NotMaximal {
        set: AgentSet,
        split: AgentSet,
        value: Value,
        stored: Value,
    },
}

impl DpTable {
    pub fn new(n: usize) -> Self {
        DpTable {
            n,
            entries: MaskMap::default(),
            published_level: n + 1,
        }
    }

    #[inline]
    pub fn get(&self, set: AgentSet) -> Option<Entry> {
        self.entries.get(&set).copied()
    }

    #[inline]
    pub fn v_star(&self, set: AgentSet) -> Option<Value> {
        self.entries.get(&set).map(|e| e.v_star)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentSet, Entry)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// Smallest level `i` such that every subproblem anchored at
    /// `b_i, .., b_n` is present. Starts at `n + 1`.
    pub fn published_level(&self) -> usize {
        self.published_level
    }

    pub(crate) fn publish(&mut self, level: usize) {
        debug_assert!(level <= self.published_level);
        self.published_level = self.published_level.min(level);
    }

    pub(crate) fn insert(&mut self, set: AgentSet, entry: Entry) {
        let prev = self.entries.insert(set, entry);
        debug_assert!(
            prev.is_none() || set == AgentSet::full(self.n),
            "table entry {set} written twice"
        );
    }

    /// `Σ v*(T)` over the components of `remainder`, or the first missing one.
    pub fn completion_value(&self, graph: &Graph, remainder: AgentSet) -> Result<Value, AgentSet> {
        completion_value(graph, remainder, |t| self.v_star(t))
    }

    /// Expands every seed block into an optimal partition of it.
    ///
    /// A block `C` with an entry is split into `bestSubset(C)`, which is
    /// final, and the connected components of `C ∖ bestSubset(C)`, which are
    /// expanded in turn. A singleton without an entry is its own optimum.
    pub fn reconstruct(
        &self,
        graph: &Graph,
        seed: &[AgentSet],
    ) -> Result<Vec<AgentSet>, SolveError> {
        let mut open: Vec<AgentSet> = seed.to_vec();
        let mut out = Vec::with_capacity(seed.len());
        while let Some(c) = open.pop() {
            match self.get(c) {
                Some(e) => {
                    out.push(e.best_subset);
                    open.extend(graph.components(c - e.best_subset));
                }
                None if c.len() == 1 => out.push(c),
                None => return Err(SolveError::MissingSubproblem(c)),
            }
        }
        Ok(out)
    }

    /// Checks every entry against the recurrence
    /// `v*(C) = max_S v(S) + Σ_T v*(T)`, `S` ranging over connected subsets of
    /// `C` holding its anchor and `T` over the components of `C ∖ S`.
    ///
    /// The anchor is the member of `C` earliest in the breadth-first order.
    pub fn audit(&self, game: &Game, graph: &Graph, pt: &Pseudotree) -> Result<(), AuditError> {
        for (set, entry) in self.iter() {
            let anchor = pt.first_in(set).expect("table entries are nonempty");
            let best = entry.best_subset;
            if !graph.is_connected(set) {
                return Err(AuditError::Disconnected { set });
            }
            if !best.is_subset(set) || !best.contains(anchor) || !graph.is_connected(best) {
                return Err(AuditError::BadSubset { set, best });
            }
            let split_value = |s: AgentSet| -> Result<Value, AuditError> {
                let rest = self
                    .completion_value(graph, set - s)
                    .map_err(|missing| AuditError::Missing { set, missing })?;
                Ok(game.value(s) + rest)
            };
            let recomputed = split_value(best)?;
            if recomputed != entry.v_star {
                return Err(AuditError::Inconsistent {
                    set,
                    stored: entry.v_star,
                    recomputed,
                });
            }
            for s in ConnectedSubsets::containing(graph, set, AgentSet::singleton(anchor)) {
                let value = split_value(s)?;
                if value > entry.v_star {
                    return Err(AuditError::NotMaximal {
                        set,
                        split: s,
                        value,
                        stored: entry.v_star,
                    });
                }
            }
        }
        Ok(())
    }
}
