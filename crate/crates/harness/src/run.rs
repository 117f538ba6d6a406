//! Solving an instance, one connected component at a time.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use csg_core::solvers::NoBound;
use csg_core::{
    solve, AgentSet, Algorithm, DtspMode, Graph, Partition, Pseudotree, SearchBound, SolveError,
    SolveOptions, SolverResult, Stats, Status, SuperSubBound, TracePoint, Value,
};

use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundKind {
    #[default]
    None,
    SuperSub,
}

impl BoundKind {
    pub fn get(self) -> &'static dyn SearchBound {
        match self {
            BoundKind::None => &NoBound,
            BoundKind::SuperSub => &SuperSubBound,
        }
    }
}

impl FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(BoundKind::None),
            "supersub" => Ok(BoundKind::SuperSub),
            _ => Err(format!("unknown bound '{s}' (none, supersub)")),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::None => "none",
            BoundKind::SuperSub => "supersub",
        })
    }
}

#[derive(Clone, Copy)]
pub struct RunConfig<'a> {
    pub algorithm: Algorithm,
    pub bound: &'a dyn SearchBound,
    pub mode: DtspMode,
    pub deadline: Option<Instant>,
}

impl RunConfig<'_> {
    pub fn new(algorithm: Algorithm) -> Self {
        RunConfig {
            algorithm,
            bound: &NoBound,
            mode: DtspMode::default(),
            deadline: None,
        }
    }
}

/// The subgraph induced by `agents`, relabeled `0..agents.len()` in order.
pub fn induced_subgraph(graph: &Graph, agents: &[usize]) -> Graph {
    let mut local = vec![usize::MAX; graph.n()];
    for (i, &a) in agents.iter().enumerate() {
        local[a] = i;
    }
    let edges: Vec<_> = graph
        .edges()
        .iter()
        .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
        .map(|&(u, v)| (local[u], local[v]))
        .collect();
    Graph::new(agents.len(), &edges).expect("relabeled edges stay valid")
}

/// Solves each connected component separately and merges the optima.
///
/// The pinned root is used in its own component; every other component is
/// rooted at its lowest agent. The merged trace lists every component's
/// improvements on one clock, valuing the other components at their final
/// incumbent if already solved and at their first incumbent otherwise.
pub fn solve_instance(inst: &Instance, cfg: &RunConfig<'_>) -> Result<SolverResult, SolveError> {
    let graph = &inst.graph;
    let game = inst.game();
    let comps: Vec<AgentSet> = graph.components(graph.agents()).collect();
    if comps.len() == 1 {
        let root = inst.root.unwrap_or(0);
        let pt = Pseudotree::build(graph, root).expect("connected");
        return solve(cfg.algorithm, game, graph, &pt, options(cfg));
    }

    let start = Instant::now();
    let mut parts = Vec::with_capacity(comps.len());
    for comp in &comps {
        let agents: Vec<usize> = comp.iter().collect();
        let sub = induced_subgraph(graph, &agents);
        let sub_game = game
            .restrict(&agents)
            .expect("restriction of a valid game is valid");
        let root = inst
            .root
            .and_then(|r| agents.iter().position(|&a| a == r))
            .unwrap_or(0);
        let pt = Pseudotree::build(&sub, root).expect("components are connected");
        let offset = start.elapsed();
        let r = solve(cfg.algorithm, &sub_game, &sub, &pt, options(cfg))?;
        parts.push((agents, offset, r));
    }
    Ok(merge(parts, start.elapsed()))
}

fn options<'a>(cfg: &RunConfig<'a>) -> SolveOptions<'a> {
    let mut opts = SolveOptions::default()
        .with_bound(cfg.bound)
        .with_mode(cfg.mode);
    opts.deadline = cfg.deadline;
    opts
}

fn merge(parts: Vec<(Vec<usize>, Duration, SolverResult)>, elapsed: Duration) -> SolverResult {
    let first: Vec<Value> = parts
        .iter()
        .map(|(_, _, r)| r.trace.first().map_or(r.best_value, |t| t.value))
        .collect();
    let last: Vec<Value> = parts.iter().map(|(_, _, r)| r.best_value).collect();

    let mut blocks = Vec::new();
    let mut stats = Stats::default();
    let mut status = Status::Optimal;
    let mut trace = Vec::new();
    for (k, (agents, offset, r)) in parts.iter().enumerate() {
        let lift = |s: AgentSet| -> AgentSet { s.iter().map(|i| agents[i]).collect() };
        blocks.extend(r.best.blocks().iter().map(|&b| lift(b)));
        stats += r.stats;
        if r.status == Status::Interrupted {
            status = Status::Interrupted;
        }
        let before: Value = last[..k].iter().sum();
        let after: Value = first[k + 1..].iter().sum();
        trace.extend(r.trace.iter().map(|t| TracePoint {
            elapsed: *offset + t.elapsed,
            value: before + t.value + after,
        }));
    }
    trace.dedup_by(|b, a| b.value <= a.value);
    SolverResult {
        best: Partition::new(blocks).expect("components are disjoint"),
        best_value: last.iter().sum(),
        status,
        stats,
        trace,
        elapsed,
        table: None,
        frontier: None,
    }
}
