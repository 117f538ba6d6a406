//! Dynamic programming over the pseudotree's breadth-first order.
//!
//! Level `i` (from `b_n` down to `b_2`) solves every subproblem `C` with
//! `b_i ∈ C ⊆ {b_i, .., b_n}`, `C` connected and `A ∖ C` connected, by
//!
//! ```text
//! v*(C) = max over connected S ⊆ C with b_i ∈ S of  v(S) + Σ_{T ∈ comp(C ∖ S)} v*(T)
//! ```
//!
//! Every component `T` above is anchored strictly deeper than `b_i` and has a
//! connected complement, so it was solved at an earlier level. A level
//! therefore only reads entries of previous levels.

use std::time::Instant;

use crate::agents::AgentSet;
use crate::enumerate::ConnectedSubsets;
use crate::game::{Game, Partition, Value};
use crate::graph::Graph;
use crate::pseudotree::Pseudotree;

use super::table::{DpTable, Entry};
use super::track::{IncumbentSink, Tracker};
use super::{
    completion_value, validate, Clock, SolveError, SolveOptions, SolverResult, Stats, Status,
};

pub(crate) struct Ctx<'a> {
    pub game: &'a Game,
    pub graph: &'a Graph,
    pub pt: &'a Pseudotree,
    pub all: AgentSet,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(game: &'a Game, graph: &'a Graph, pt: &'a Pseudotree) -> Self {
        Ctx {
            game,
            graph,
            pt,
            all: graph.agents(),
        }
    }
}

/// Why a level stopped early.
pub(crate) enum Halt {
    Expired,
    Stopped,
}

/// Best anchored split of `c`: the first strictly best `S` wins.
fn best_split(
    ctx: &Ctx<'_>,
    c: AgentSet,
    anchor: usize,
    lookup: &impl Fn(AgentSet) -> Option<Value>,
    stats: &mut Stats,
) -> Result<Entry, SolveError> {
    let mut best: Option<Entry> = None;
    for s in ConnectedSubsets::containing(ctx.graph, c, AgentSet::singleton(anchor)) {
        stats.subsets_enumerated += 1;
        let rest =
            completion_value(ctx.graph, c - s, lookup).map_err(SolveError::MissingSubproblem)?;
        let value = ctx.game.value(s) + rest;
        if best.is_none_or(|b| b.v_star < value) {
            best = Some(Entry {
                v_star: value,
                best_subset: s,
            });
        }
    }
    Ok(best.expect("the anchor alone is a connected split"))
}

/// Solves every subproblem of level `i` against `table`, which must hold all
/// deeper levels. Entries are returned rather than inserted.
pub(crate) fn solve_level(
    ctx: &Ctx<'_>,
    level: usize,
    table: &DpTable,
    stats: &mut Stats,
    clock: &mut Clock,
    stop: &dyn Fn() -> bool,
) -> Result<Result<Vec<(AgentSet, Entry)>, Halt>, SolveError> {
    let anchor = ctx.pt.agent_at(level);
    let ground = ctx.pt.suffix(level);
    let lookup = |t: AgentSet| table.v_star(t);
    let mut out = Vec::new();
    for c in ConnectedSubsets::containing(ctx.graph, ground, AgentSet::singleton(anchor)) {
        if clock.expired() {
            return Ok(Err(Halt::Expired));
        }
        if stop() {
            return Ok(Err(Halt::Stopped));
        }
        stats.subsets_enumerated += 1;
        if !ctx.graph.is_connected(ctx.all - c) {
            continue;
        }
        let entry = best_split(ctx, c, anchor, &lookup, stats)?;
        stats.dp_entries += 1;
        out.push((c, entry));
    }
    Ok(Ok(out))
}

/// Candidate structures after level `i`: every connected `S` with
/// `{b_1, .., b_{i-1}} ⊆ S ⊆ A ∖ {b_i}`, completed optimally from the table.
/// `consider` receives `(value, S)` in enumeration order.
pub(crate) fn scan_level(
    ctx: &Ctx<'_>,
    level: usize,
    table: &DpTable,
    stats: &mut Stats,
    clock: &mut Clock,
    stop: &dyn Fn() -> bool,
    mut consider: impl FnMut(Value, AgentSet, &DpTable) -> Result<(), SolveError>,
) -> Result<Result<(), Halt>, SolveError> {
    let required = ctx.pt.prefix(level - 1);
    let forbidden = AgentSet::singleton(ctx.pt.agent_at(level));
    for s in ConnectedSubsets::new(ctx.graph, ctx.all, required, forbidden) {
        if clock.expired() {
            return Ok(Err(Halt::Expired));
        }
        if stop() {
            return Ok(Err(Halt::Stopped));
        }
        stats.subsets_enumerated += 1;
        let rest = table
            .completion_value(ctx.graph, ctx.all - s)
            .map_err(SolveError::MissingSubproblem)?;
        consider(ctx.game.value(s) + rest, s, table)?;
    }
    Ok(Ok(()))
}

fn never() -> bool {
    false
}

/// Dynamic programming; returns an optimal structure and the full table.
///
/// Not anytime: an expired budget yields [`SolveError::BudgetExhausted`].
pub fn dype(
    game: &Game,
    graph: &Graph,
    pt: &Pseudotree,
    opts: SolveOptions<'_>,
) -> Result<SolverResult, SolveError> {
    validate(game, graph, Some(pt))?;
    let start = Instant::now();
    let ctx = Ctx::new(game, graph, pt);
    let n = graph.n();
    let mut clock = Clock::new(opts.deadline);
    let mut stats = Stats::default();
    let mut table = DpTable::new(n);

    for level in (2..=n).rev() {
        let entries = solve_level(&ctx, level, &table, &mut stats, &mut clock, &never)?
            .map_err(|_| SolveError::BudgetExhausted)?;
        for (c, e) in entries {
            table.insert(c, e);
        }
        table.publish(level);
    }

    let root = pt.agent_at(1);
    let whole = best_split(&ctx, ctx.all, root, &|t| table.v_star(t), &mut stats)?;
    stats.dp_entries += 1;
    table.insert(ctx.all, whole);
    table.publish(1);
    if clock.expired() {
        return Err(SolveError::BudgetExhausted);
    }

    let blocks = table.reconstruct(graph, &[ctx.all])?;
    let best = Partition::from_blocks_unchecked(blocks);
    let elapsed = start.elapsed();
    let trace = vec![super::TracePoint {
        elapsed,
        value: whole.v_star,
    }];
    if let Some(mut hook) = opts.on_incumbent {
        hook(&super::Improvement {
            elapsed,
            value: whole.v_star,
            blocks: best.blocks(),
        });
    }
    Ok(SolverResult {
        best_value: whole.v_star,
        best,
        status: Status::Optimal,
        stats,
        trace,
        elapsed,
        table: Some(table),
        frontier: None,
    })
}

/// Anytime dynamic programming.
///
/// Starts from `{A}`. After each level `i` it evaluates every structure whose
/// `b_1`-block contains `b_1, .., b_{i-1}` but not `b_i`, completing the rest
/// from the table, and keeps the best one as incumbent. Over all levels these
/// scans cover every structure other than `{A}`.
pub fn dype_star(
    game: &Game,
    graph: &Graph,
    pt: &Pseudotree,
    opts: SolveOptions<'_>,
) -> Result<SolverResult, SolveError> {
    validate(game, graph, Some(pt))?;
    let start = Instant::now();
    let ctx = Ctx::new(game, graph, pt);
    let n = graph.n();
    let mut clock = Clock::new(opts.deadline);
    let mut stats = Stats::default();
    let mut table = DpTable::new(n);
    let mut tracker = Tracker::new(start, opts.on_incumbent);

    let v_all = game.value(ctx.all);
    tracker.offer(v_all, &mut || vec![ctx.all]);
    table.insert(
        ctx.all,
        Entry {
            v_star: v_all,
            best_subset: ctx.all,
        },
    );

    let mut status = Status::Optimal;
    for level in (2..=n).rev() {
        let entries = match solve_level(&ctx, level, &table, &mut stats, &mut clock, &never)? {
            Ok(entries) => entries,
            Err(_) => {
                status = Status::Interrupted;
                break;
            }
        };
        for (c, e) in entries {
            table.insert(c, e);
        }
        table.publish(level);

        let mut improved: Option<Entry> = None;
        let scan = scan_level(
            &ctx,
            level,
            &table,
            &mut stats,
            &mut clock,
            &never,
            |value, s, table| {
                let current = improved.map_or_else(|| table.v_star(ctx.all).unwrap(), |e| e.v_star);
                if current < value {
                    improved = Some(Entry {
                        v_star: value,
                        best_subset: s,
                    });
                    let mut blocks = vec![s];
                    blocks.extend(table.reconstruct(
                        graph,
                        &ctx.graph.components(ctx.all - s).collect::<Vec<_>>(),
                    )?);
                    tracker.offer(value, &mut || std::mem::take(&mut blocks));
                }
                Ok(())
            },
        )?;
        if let Some(e) = improved {
            table.insert(ctx.all, e);
        }
        if scan.is_err() {
            status = Status::Interrupted;
            break;
        }
    }

    let (best, trace) = tracker.into_parts();
    let (best_value, blocks) = best.expect("initialized with {A}");
    Ok(SolverResult {
        best: Partition::from_blocks_unchecked(blocks),
        best_value,
        status,
        stats,
        trace,
        elapsed: start.elapsed(),
        table: Some(table),
        frontier: None,
    })
}
