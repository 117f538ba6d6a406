//! Characteristic functions, partitions and the branch-and-bound upper bounds.

use std::fmt;

use thiserror::Error;

use crate::agents::{AgentSet, MAX_AGENTS};
use crate::graph::Graph;

/// Coalition and partition values.
///
/// Values are exact integers so that solver results can be compared by
/// equality. Fractional games should be scaled to fixed point by the caller.
pub type Value = i64;

/// Largest agent count for a fully tabulated game (`2^n` entries).
pub const MAX_TABLE_AGENTS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("agent count {0} is out of range (1..={1})")]
    AgentCount(usize, usize),
    #[error("value table has {got} entries, expected {expected}")]
    TableLength { got: usize, expected: usize },
    #[error("{field} must have {expected} entries, got {got}")]
    ParamLength {
        field: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("invalid parameter {field}: {reason}")]
    Param { field: &'static str, reason: String },
    #[error("game has no super/subadditive decomposition")]
    NotDecomposed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// `table[mask]`, with `table[0] = 0`.
    Table(Vec<Value>),
    /// `sup(C) = (Σ_{i∈C} w_i)·|C|`, `sub(C) = −κ·|C|²`.
    SuperSub { weights: Vec<Value>, kappa: Value },
}

/// A characteristic function over `n` agents.
///
/// Either fully tabulated, or given in the parametric super-subadditive form
/// `v = v_sup + v_sub` where `v_sup` is weakly superadditive and `v_sub` is
/// weakly subadditive. Only the latter carries a decomposition, which the
/// branch-and-bound bounds need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    n: usize,
    repr: Repr,
}

impl Game {
    /// A tabulated game from `2^n − 1` values in bitmask order (mask 1 first).
    pub fn from_table(n: usize, values: Vec<Value>) -> Result<Self, GameError> {
        if n == 0 || n > MAX_TABLE_AGENTS {
            return Err(GameError::AgentCount(n, MAX_TABLE_AGENTS));
        }
        let expected = (1usize << n) - 1;
        if values.len() != expected {
            return Err(GameError::TableLength {
                got: values.len(),
                expected,
            });
        }
        let mut table = Vec::with_capacity(expected + 1);
        table.push(0);
        table.extend(values);
        Ok(Game {
            n,
            repr: Repr::Table(table),
        })
    }

    /// Tabulates `f` over every nonempty coalition.
    pub fn from_fn(n: usize, f: impl Fn(AgentSet) -> Value) -> Result<Self, GameError> {
        if n == 0 || n > MAX_TABLE_AGENTS {
            return Err(GameError::AgentCount(n, MAX_TABLE_AGENTS));
        }
        let values = (1..1u64 << n).map(|m| f(AgentSet::from_bits(m))).collect();
        Game::from_table(n, values)
    }

    /// The parametric super-subadditive game with the given weights and cost
    /// factor. Weights and `kappa` must be non-negative.
    pub fn supersub(weights: Vec<Value>, kappa: Value) -> Result<Self, GameError> {
        let n = weights.len();
        if n == 0 || n > MAX_AGENTS {
            return Err(GameError::AgentCount(n, MAX_AGENTS));
        }
        if let Some(w) = weights.iter().find(|w| **w < 0) {
            return Err(GameError::Param {
                field: "weights",
                reason: format!("weight {w} is negative"),
            });
        }
        if kappa < 0 {
            return Err(GameError::Param {
                field: "kappa",
                reason: format!("{kappa} is negative"),
            });
        }
        Ok(Game {
            n,
            repr: Repr::SuperSub { weights, kappa },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn agents(&self) -> AgentSet {
        AgentSet::full(self.n)
    }

    /// `v(c)`; `v(∅) = 0`.
    #[inline]
    pub fn value(&self, c: AgentSet) -> Value {
        match &self.repr {
            Repr::Table(t) => t[c.bits() as usize],
            Repr::SuperSub { .. } => {
                self.sup_value(c).unwrap_or(0) + self.sub_value(c).unwrap_or(0)
            }
        }
    }

    pub fn is_decomposed(&self) -> bool {
        matches!(self.repr, Repr::SuperSub { .. })
    }

    /// Whether the game is known to be weakly super-subadditive.
    pub fn is_super_subadditive(&self) -> bool {
        self.is_decomposed()
    }

    #[inline]
    pub fn sup_value(&self, c: AgentSet) -> Option<Value> {
        match &self.repr {
            Repr::SuperSub { weights, .. } => {
                let w: Value = c.iter().map(|a| weights[a]).sum();
                Some(w * c.len() as Value)
            }
            Repr::Table(_) => None,
        }
    }

    #[inline]
    pub fn sub_value(&self, c: AgentSet) -> Option<Value> {
        match &self.repr {
            Repr::SuperSub { kappa, .. } => {
                let k = c.len() as Value;
                Some(-kappa * k * k)
            }
            Repr::Table(_) => None,
        }
    }

    /// Parameters of the parametric form, if this is one.
    pub fn supersub_params(&self) -> Option<(&[Value], Value)> {
        match &self.repr {
            Repr::SuperSub { weights, kappa } => Some((weights, *kappa)),
            Repr::Table(_) => None,
        }
    }

    /// The raw table (`2^n − 1` entries, mask 1 first), if tabulated.
    pub fn table(&self) -> Option<&[Value]> {
        match &self.repr {
            Repr::Table(t) => Some(&t[1..]),
            Repr::SuperSub { .. } => None,
        }
    }

    /// The game restricted to `agents`, relabeled `0..agents.len()` in the
    /// given order.
    pub fn restrict(&self, agents: &[usize]) -> Result<Game, GameError> {
        let lift = |sub: AgentSet| -> AgentSet { sub.iter().map(|i| agents[i]).collect() };
        match &self.repr {
            Repr::Table(_) => Game::from_fn(agents.len(), |s| self.value(lift(s))),
            Repr::SuperSub { weights, kappa } => {
                Game::supersub(agents.iter().map(|&a| weights[a]).collect(), *kappa)
            }
        }
    }

    /// `V(P) = Σ_{p∈P} v(p)`.
    pub fn partition_value(&self, blocks: &[AgentSet]) -> Value {
        blocks.iter().map(|&b| self.value(b)).sum()
    }

    /// Exhaustive check of weak superadditivity of `v_sup` and weak
    /// subadditivity of `v_sub` over all disjoint pairs. `O(3^n)`.
    pub fn check_super_subadditive(&self) -> Result<bool, GameError> {
        if !self.is_decomposed() {
            return Err(GameError::NotDecomposed);
        }
        let all = self.agents();
        for c in all.subsets() {
            for d in (all - c).subsets() {
                let u = c | d;
                let sup = |s| self.sup_value(s).unwrap();
                let sub = |s| self.sub_value(s).unwrap();
                if sup(u) < sup(c) + sup(d) || sub(u) > sub(c) + sub(d) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Upper bound on every coalition structure over `A` that extends a partial
/// partition of value `partial_value` by connected blocks over `remainder`:
/// `V(P) + v_sup(remainder) + Σ_{a∈remainder} v_sub({a})`.
pub fn upper_bound_tsp(
    game: &Game,
    partial_value: Value,
    remainder: AgentSet,
) -> Result<Value, GameError> {
    let sup = game.sup_value(remainder).ok_or(GameError::NotDecomposed)?;
    let sub: Value = remainder
        .iter()
        .map(|a| game.sub_value(AgentSet::singleton(a)).unwrap_or(0))
        .sum();
    Ok(partial_value + sup + sub)
}

/// Edge-contraction bound `V_sub(P) + V_sup(P_merge)`, where `P_merge` merges
/// every group of blocks joined by solid edges.
pub fn upper_bound_cfss(
    game: &Game,
    blocks: &[AgentSet],
    merged: &[AgentSet],
) -> Result<Value, GameError> {
    let mut total = 0;
    for &b in blocks {
        total += game.sub_value(b).ok_or(GameError::NotDecomposed)?;
    }
    for &m in merged {
        total += game.sup_value(m).ok_or(GameError::NotDecomposed)?;
    }
    Ok(total)
}

/// A set of pairwise-disjoint nonempty coalitions.
///
/// Blocks are kept sorted by lowest member so that equal partitions compare
/// equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    blocks: Vec<AgentSet>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("empty block")]
    EmptyBlock,
    #[error("blocks {0} and {1} overlap")]
    Overlap(AgentSet, AgentSet),
}

impl Partition {
    pub fn new(mut blocks: Vec<AgentSet>) -> Result<Self, PartitionError> {
        blocks.sort_by_key(|b| b.first());
        let mut covered = AgentSet::EMPTY;
        for (i, &b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            if !b.is_disjoint(covered) {
                let other = blocks[..i].iter().find(|o| !o.is_disjoint(b)).unwrap();
                return Err(PartitionError::Overlap(*other, b));
            }
            covered |= b;
        }
        Ok(Partition { blocks })
    }

    /// Callers guarantee disjoint nonempty blocks.
    pub(crate) fn from_blocks_unchecked(mut blocks: Vec<AgentSet>) -> Self {
        blocks.sort_by_key(|b| b.first());
        debug_assert!(Partition::new(blocks.clone()).is_ok());
        Partition { blocks }
    }

    pub fn singletons(agents: AgentSet) -> Self {
        Partition {
            blocks: agents.iter().map(AgentSet::singleton).collect(),
        }
    }

    pub fn blocks(&self) -> &[AgentSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn covered(&self) -> AgentSet {
        self.blocks.iter().fold(AgentSet::EMPTY, |acc, &b| acc | b)
    }

    pub fn value(&self, game: &Game) -> Value {
        game.partition_value(&self.blocks)
    }

    /// Every block induces a connected subgraph.
    pub fn is_feasible(&self, graph: &Graph) -> bool {
        self.blocks.iter().all(|&b| graph.is_connected(b))
    }

    /// A G-feasible coalition structure over all of `graph`'s agents.
    pub fn is_feasible_structure(&self, graph: &Graph) -> bool {
        self.covered() == graph.agents() && self.is_feasible(graph)
    }

    /// Blocks as agent lists.
    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().collect()).collect()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.blocks).finish()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}
