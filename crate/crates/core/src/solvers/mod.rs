//! Exact solvers for coalition structure generation on graphs.
//!
//! | solver | kind |
//! |---|---|
//! | [`brute_force_best`] | exhaustive oracle over all feasible structures |
//! | [`dype`] | dynamic programming over the pseudotree's breadth-first order |
//! | [`tsp`] | depth-first branch and bound over the same order |
//! | [`dype_star`] | anytime variant of `dype` |
//! | [`d_tsp`] | `dype_star` and `tsp` run against a shared table, meeting in the middle |
//! | [`cfss`] | edge-contraction branch and bound |
//!
//! Every solver returns a [`SolverResult`] with the structure, its value and
//! work counters. Ties keep the first structure found.

mod brute;
mod cfss;
mod dtsp;
mod dype;
mod table;
mod track;
mod tsp;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::agents::AgentSet;
use crate::game::{upper_bound_cfss, upper_bound_tsp, Game, Partition, Value};
use crate::graph::Graph;
use crate::pseudotree::Pseudotree;

pub use brute::{brute_force_best, enumerate_feasible_structures, FeasibleStructures};
pub use cfss::{cfss, expand_contraction_tree, ContractionNode};
pub use dtsp::{d_tsp, DtspMode, Schedule};
pub use dype::{dype, dype_star};
pub use table::{AuditError, DpTable, Entry};
pub use tsp::{tsp, tsp_star_step, GuardFailure, Incumbent};

/// Default cap on `n` for the brute-force oracle.
pub const ORACLE_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("graph is not connected; decompose it into components first")]
    Disconnected,
    #[error("game has {game} agents but the graph has {graph}")]
    SizeMismatch { game: usize, graph: usize },
    #[error("pseudotree does not belong to this graph")]
    PseudotreeMismatch,
    #[error("{n} agents exceeds the brute-force cap of {cap}")]
    OracleCap { n: usize, cap: usize },
    #[error("internal invariant violated: no table entry for {0}")]
    MissingSubproblem(AgentSet),
    #[error("time budget exhausted before an answer was available")]
    BudgetExhausted,
    #[error("interleaving schedule gives neither worker any turns")]
    InvalidSchedule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Oracle,
    Dype,
    Tsp,
    DypeStar,
    DTsp,
    Cfss,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Oracle,
        Algorithm::Dype,
        Algorithm::Tsp,
        Algorithm::DypeStar,
        Algorithm::DTsp,
        Algorithm::Cfss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Oracle => "oracle",
            Algorithm::Dype => "dype",
            Algorithm::Tsp => "tsp",
            Algorithm::DypeStar => "dype-star",
            Algorithm::DTsp => "d-tsp",
            Algorithm::Cfss => "cfss",
        }
    }

    /// Whether the solver keeps a usable incumbent when interrupted.
    pub fn is_anytime(self) -> bool {
        matches!(
            self,
            Algorithm::DypeStar | Algorithm::DTsp | Algorithm::Cfss
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}'"))
    }
}

/// Work counters. They measure effort independently of wall-clock time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Connected subsets produced by the enumerators.
    pub subsets_enumerated: u64,
    /// DP subproblems solved (table entries written).
    pub dp_entries: u64,
    /// Search nodes generated (partial partitions or contraction states).
    pub nodes_expanded: u64,
    /// Search nodes cut off by the bound.
    pub nodes_pruned: u64,
    /// Complete coalition structures evaluated by explicit search.
    pub structures_visited: u64,
    /// Subtrees completed from the DP table instead of being searched.
    pub shortcuts: u64,
    /// Table completions that were applicable by level but found an entry missing.
    pub guard_fallbacks: u64,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, o: Stats) {
        self.subsets_enumerated += o.subsets_enumerated;
        self.dp_entries += o.dp_entries;
        self.nodes_expanded += o.nodes_expanded;
        self.nodes_pruned += o.nodes_pruned;
        self.structures_visited += o.structures_visited;
        self.shortcuts += o.shortcuts;
        self.guard_fallbacks += o.guard_fallbacks;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TracePoint {
    pub elapsed: Duration,
    pub value: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Search finished; `best` is optimal.
    Optimal,
    /// Budget ran out; `best` is the incumbent at cutoff.
    Interrupted,
}

/// Where the two D-TSP frontiers stopped. Positions are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frontier {
    /// Next DP level to solve; levels above it are complete.
    pub dype_next: usize,
    /// Next tree-search stage; stages below it are complete.
    pub tsp_next: usize,
    pub dype_units: u64,
    pub tsp_units: u64,
}

impl Frontier {
    pub fn crossed(&self) -> bool {
        self.dype_next < self.tsp_next
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub best: Partition,
    pub best_value: Value,
    pub status: Status,
    pub stats: Stats,
    /// Incumbent improvements; values strictly increase along it.
    pub trace: Vec<TracePoint>,
    pub elapsed: Duration,
    /// The DP table, for solvers that build one.
    pub table: Option<DpTable>,
    pub frontier: Option<Frontier>,
}

/// Passed to the incumbent callback on every improvement.
#[derive(Debug)]
pub struct Improvement<'a> {
    pub elapsed: Duration,
    pub value: Value,
    pub blocks: &'a [AgentSet],
}

/// Upper bounds used for pruning. `None` means unbounded (prune nothing).
pub trait SearchBound: Sync {
    /// Bound on every structure extending a partial partition of value
    /// `partial_value` that leaves `remainder` uncovered.
    fn tsp(&self, game: &Game, partial_value: Value, remainder: AgentSet) -> Option<Value>;

    /// Bound on every structure in the contraction subtree rooted at `blocks`,
    /// where `merged` joins all blocks linked by solid edges.
    fn cfss(&self, game: &Game, blocks: &[AgentSet], merged: &[AgentSet]) -> Option<Value>;
}

/// Never prunes.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoBound;

impl SearchBound for NoBound {
    fn tsp(&self, _: &Game, _: Value, _: AgentSet) -> Option<Value> {
        None
    }

    fn cfss(&self, _: &Game, _: &[AgentSet], _: &[AgentSet]) -> Option<Value> {
        None
    }
}

/// The super-subadditive bounds; falls back to unbounded for games without
/// a decomposition.
#[derive(Clone, Copy, Debug, Default)]
pub struct SuperSubBound;

impl SearchBound for SuperSubBound {
    fn tsp(&self, game: &Game, partial_value: Value, remainder: AgentSet) -> Option<Value> {
        upper_bound_tsp(game, partial_value, remainder).ok()
    }

    fn cfss(&self, game: &Game, blocks: &[AgentSet], merged: &[AgentSet]) -> Option<Value> {
        upper_bound_cfss(game, blocks, merged).ok()
    }
}

pub type IncumbentHook<'a> = Box<dyn FnMut(&Improvement<'_>) + Send + 'a>;
pub type StructureHook<'a> = Box<dyn FnMut(&[AgentSet]) + Send + 'a>;

pub struct SolveOptions<'a> {
    pub bound: &'a dyn SearchBound,
    pub deadline: Option<Instant>,
    /// Fires on every incumbent improvement.
    pub on_incumbent: Option<IncumbentHook<'a>>,
    /// Fires on every complete structure reached by explicit search
    /// (`tsp` and `cfss` only).
    pub on_structure: Option<StructureHook<'a>>,
    pub oracle_cap: usize,
    pub dtsp_mode: DtspMode,
}

impl Default for SolveOptions<'_> {
    fn default() -> Self {
        SolveOptions {
            bound: &NoBound,
            deadline: None,
            on_incumbent: None,
            on_structure: None,
            oracle_cap: ORACLE_CAP,
            dtsp_mode: DtspMode::default(),
        }
    }
}

impl<'a> SolveOptions<'a> {
    pub fn with_bound(mut self, bound: &'a dyn SearchBound) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_deadline(mut self, deadline: Instant) -> Self {
        self.deadline = Some(deadline);
        self
    }

    pub fn with_budget(self, budget: Duration) -> Self {
        self.with_deadline(Instant::now() + budget)
    }

    pub fn with_mode(mut self, mode: DtspMode) -> Self {
        self.dtsp_mode = mode;
        self
    }

    pub fn on_incumbent(mut self, f: impl FnMut(&Improvement<'_>) + Send + 'a) -> Self {
        self.on_incumbent = Some(Box::new(f));
        self
    }

    pub fn on_structure(mut self, f: impl FnMut(&[AgentSet]) + Send + 'a) -> Self {
        self.on_structure = Some(Box::new(f));
        self
    }
}

/// Runs `algorithm` on a connected instance.
pub fn solve(
    algorithm: Algorithm,
    game: &Game,
    graph: &Graph,
    pt: &Pseudotree,
    opts: SolveOptions<'_>,
) -> Result<SolverResult, SolveError> {
    match algorithm {
        Algorithm::Oracle => brute_force_best(game, graph, opts),
        Algorithm::Dype => dype(game, graph, pt, opts),
        Algorithm::Tsp => tsp(game, graph, pt, opts),
        Algorithm::DypeStar => dype_star(game, graph, pt, opts),
        Algorithm::DTsp => d_tsp(game, graph, pt, opts),
        Algorithm::Cfss => cfss(game, graph, opts),
    }
}

pub(crate) fn validate(
    game: &Game,
    graph: &Graph,
    pt: Option<&Pseudotree>,
) -> Result<(), SolveError> {
    if game.n() != graph.n() {
        return Err(SolveError::SizeMismatch {
            game: game.n(),
            graph: graph.n(),
        });
    }
    if !graph.is_connected_graph() {
        return Err(SolveError::Disconnected);
    }
    if let Some(pt) = pt {
        if pt.n() != graph.n()
            || !pt.is_spanning_tree_of(graph)
            || !pt.satisfies_branch_property(graph)
        {
            return Err(SolveError::PseudotreeMismatch);
        }
    }
    Ok(())
}

/// Amortized deadline checks.
pub(crate) struct Clock {
    deadline: Option<Instant>,
    ticks: u32,
    expired: bool,
}

impl Clock {
    pub(crate) fn new(deadline: Option<Instant>) -> Self {
        Clock {
            deadline,
            ticks: 0,
            expired: false,
        }
    }

    #[inline]
    pub(crate) fn expired(&mut self) -> bool {
        if self.expired {
            return true;
        }
        let Some(deadline) = self.deadline else {
            return false;
        };
        if self.ticks.is_multiple_of(32) && Instant::now() >= deadline {
            self.expired = true;
        }
        self.ticks = self.ticks.wrapping_add(1);
        self.expired
    }
}

/// `Σ v*(T)` over the components `T` of `remainder`, or the first missing `T`.
pub(crate) fn completion_value(
    graph: &Graph,
    remainder: AgentSet,
    lookup: impl Fn(AgentSet) -> Option<Value>,
) -> Result<Value, AgentSet> {
    let mut total = 0;
    for t in graph.components(remainder) {
        total += lookup(t).ok_or(t)?;
    }
    Ok(total)
}
