//! `dype_star` and the tree search run against one shared table.
//!
//! The DP sweep works down from `b_n` one level at a time, each level ending
//! with a scan of the structures whose `b_1`-block first excludes that level's
//! agent. The tree search works up from stage `b_2`, one seed at a time, and
//! completes any subtree whose remainder lies entirely within published
//! levels straight from the table. Once the DP's next level is below the
//! search's next stage, every stage has been covered by one side or the
//! other and the incumbent is optimal.

use std::iter::Peekable;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{RwLock, RwLockReadGuard};
use std::thread;
use std::time::Instant;

use rand::Rng;

use crate::agents::AgentSet;
use crate::enumerate::ConnectedSubsets;
use crate::game::{Game, Partition, Value};
use crate::graph::Graph;
use crate::pseudotree::Pseudotree;

use super::dype::{scan_level, solve_level, Ctx, Halt as LevelHalt};
use super::table::DpTable;
use super::track::{IncumbentSink, SharedTracker, Tracker};
use super::tsp::{Halt as SearchHalt, TableView, TreeSearch};
use super::{validate, Clock, Frontier, SolveError, SolveOptions, SolverResult, Stats, Status};

/// How the two workers share one thread.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// One unit each, DP first.
    Alternate,
    /// `dype` DP units, then `tsp` search units, repeated. A zero stalls
    /// that worker for the whole run.
    Ratio { dype: u32, tsp: u32 },
    /// A fair coin per unit.
    Random { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DtspMode {
    /// Deterministic, single thread. A DP unit is one level including its
    /// scan; a search unit is one seed coalition.
    Interleaved(Schedule),
    /// Two threads.
    Parallel,
}

impl Default for DtspMode {
    fn default() -> Self {
        DtspMode::Interleaved(Schedule::Alternate)
    }
}

struct Shared<'a> {
    table: RwLock<DpTable>,
    published: AtomicUsize,
    /// Next DP level; levels above it are done.
    dype_next: AtomicUsize,
    /// Next search stage; stages below it are done.
    tsp_next: AtomicUsize,
    incumbent: SharedTracker<'a>,
}

impl Shared<'_> {
    fn crossed(&self) -> bool {
        self.dype_next.load(Ordering::Acquire) < self.tsp_next.load(Ordering::Acquire)
    }

    fn read(&self) -> RwLockReadGuard<'_, DpTable> {
        self.table.read().unwrap_or_else(|e| e.into_inner())
    }
}

struct View<'s, 'a>(&'s Shared<'a>);

impl TableView for View<'_, '_> {
    fn published_level(&self) -> usize {
        self.0.published.load(Ordering::Acquire)
    }

    fn read<R>(&self, f: impl FnOnce(&DpTable) -> R) -> R {
        f(&self.0.read())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    Worked,
    Idle,
    Expired,
}

struct DypeWorker<'s, 'a> {
    ctx: Ctx<'s>,
    shared: &'s Shared<'a>,
    level: usize,
    /// Best value seen by the scans, `v*(A)`.
    v_all: Value,
    stats: Stats,
    clock: Clock,
    units: u64,
}

impl DypeWorker<'_, '_> {
    fn step(&mut self, stop: &dyn Fn() -> bool) -> Result<Step, SolveError> {
        if self.level < 2 || stop() {
            return Ok(Step::Idle);
        }
        let level = self.level;
        let shared = self.shared;
        let solved = {
            let table = shared.read();
            solve_level(
                &self.ctx,
                level,
                &table,
                &mut self.stats,
                &mut self.clock,
                stop,
            )?
        };
        let entries = match solved {
            Ok(entries) => entries,
            Err(LevelHalt::Expired) => return Ok(Step::Expired),
            Err(LevelHalt::Stopped) => return Ok(Step::Idle),
        };
        {
            let mut table = shared.table.write().unwrap_or_else(|e| e.into_inner());
            for (c, e) in entries {
                table.insert(c, e);
            }
            table.publish(level);
        }
        shared.published.store(level, Ordering::Release);

        let ctx = &self.ctx;
        let v_all = &mut self.v_all;
        let scanned = {
            let table = shared.read();
            scan_level(
                ctx,
                level,
                &table,
                &mut self.stats,
                &mut self.clock,
                stop,
                |value, s, table| {
                    if *v_all < value {
                        *v_all = value;
                        let comps: Vec<AgentSet> = ctx.graph.components(ctx.all - s).collect();
                        let mut blocks = vec![s];
                        blocks.extend(table.reconstruct(ctx.graph, &comps)?);
                        let mut sink = &shared.incumbent;
                        sink.offer(value, &mut || std::mem::take(&mut blocks));
                    }
                    Ok(())
                },
            )?
        };
        match scanned {
            Ok(()) => {
                self.level -= 1;
                self.units += 1;
                shared.dype_next.store(self.level, Ordering::Release);
                Ok(Step::Worked)
            }
            Err(LevelHalt::Expired) => Ok(Step::Expired),
            Err(LevelHalt::Stopped) => Ok(Step::Idle),
        }
    }
}

struct TspWorker<'s, 'a> {
    search: TreeSearch<'s, &'s SharedTracker<'a>, View<'s, 'a>>,
    shared: &'s Shared<'a>,
    n: usize,
    stage: usize,
    seeds: Option<Peekable<ConnectedSubsets<'s>>>,
    initialized: bool,
    units: u64,
}

impl TspWorker<'_, '_> {
    fn step(&mut self, stop: &dyn Fn() -> bool) -> Step {
        if self.stage > self.n || stop() {
            return Step::Idle;
        }
        if !self.initialized {
            self.search.initialize();
            self.initialized = true;
        }
        let search = &self.search;
        let stage = self.stage;
        let seeds = self
            .seeds
            .get_or_insert_with(|| search.stage_seeds(stage).peekable());
        let seed = seeds.next().expect("every stage has its prefix as a seed");
        let more = seeds.peek().is_some();
        match self.search.run_seed(seed) {
            Err(SearchHalt::Expired) => return Step::Expired,
            Err(SearchHalt::Stopped) => return Step::Idle,
            Ok(()) => {}
        }
        self.units += 1;
        if !more {
            self.stage += 1;
            self.seeds = None;
            self.shared.tsp_next.store(self.stage, Ordering::Release);
        }
        Step::Worked
    }
}

/// Runs the DP and the tree search against a shared table and incumbent
/// until their frontiers cross. Anytime.
///
/// The incumbent starts at `{A}`. The search worker offers the all-singletons
/// structure on its first unit.
pub fn d_tsp(
    game: &Game,
    graph: &Graph,
    pt: &Pseudotree,
    opts: SolveOptions<'_>,
) -> Result<SolverResult, SolveError> {
    validate(game, graph, Some(pt))?;
    if let DtspMode::Interleaved(Schedule::Ratio { dype: 0, tsp: 0 }) = opts.dtsp_mode {
        return Err(SolveError::InvalidSchedule);
    }
    let start = Instant::now();
    let n = graph.n();
    let all = graph.agents();

    let tracker = Tracker::new(start, opts.on_incumbent);
    let v_all = game.value(all);
    let shared = Shared {
        table: RwLock::new(DpTable::new(n)),
        published: AtomicUsize::new(n + 1),
        dype_next: AtomicUsize::new(n),
        tsp_next: AtomicUsize::new(2),
        incumbent: SharedTracker::new(tracker),
    };
    (&shared.incumbent).offer(v_all, &mut || vec![all]);

    let crossed = || shared.crossed();
    let mut dw = DypeWorker {
        ctx: Ctx::new(game, graph, pt),
        shared: &shared,
        level: n,
        v_all,
        stats: Stats::default(),
        clock: Clock::new(opts.deadline),
        units: 0,
    };
    let mut tw = TspWorker {
        search: TreeSearch::new(
            game,
            graph,
            pt,
            opts.bound,
            &shared.incumbent,
            View(&shared),
            Clock::new(opts.deadline),
            &crossed,
            None,
        ),
        shared: &shared,
        n,
        stage: 2,
        seeds: None,
        initialized: false,
        units: 0,
    };

    match opts.dtsp_mode {
        DtspMode::Interleaved(schedule) => interleave(&mut dw, &mut tw, schedule, &crossed)?,
        DtspMode::Parallel => {
            thread::scope(|s| {
                let dype = s.spawn(|| -> Result<(), SolveError> {
                    while dw.step(&crossed)? == Step::Worked {}
                    Ok(())
                });
                while tw.step(&crossed) == Step::Worked {}
                dype.join().expect("dp worker panicked")
            })?;
        }
    }

    let frontier = Frontier {
        dype_next: shared.dype_next.load(Ordering::Acquire),
        tsp_next: shared.tsp_next.load(Ordering::Acquire),
        dype_units: dw.units,
        tsp_units: tw.units,
    };
    let mut stats = dw.stats;
    stats += tw.search.stats;
    drop(tw);
    let table = shared.table.into_inner().unwrap_or_else(|e| e.into_inner());
    let (best, trace) = shared.incumbent.into_inner().into_parts();
    let (best_value, blocks) = best.expect("initialized with {A}");
    Ok(SolverResult {
        best: Partition::from_blocks_unchecked(blocks),
        best_value,
        status: if frontier.crossed() {
            Status::Optimal
        } else {
            Status::Interrupted
        },
        stats,
        trace,
        elapsed: start.elapsed(),
        table: Some(table),
        frontier: Some(frontier),
    })
}

fn interleave(
    dw: &mut DypeWorker<'_, '_>,
    tw: &mut TspWorker<'_, '_>,
    schedule: Schedule,
    crossed: &dyn Fn() -> bool,
) -> Result<(), SolveError> {
    let mut rng = match schedule {
        Schedule::Random { seed } => Some(crate::random::rng(seed)),
        _ => None,
    };
    let mut turn: u64 = 0;
    while !crossed() {
        let dype_turn = match schedule {
            Schedule::Alternate => turn.is_multiple_of(2),
            Schedule::Ratio { dype, tsp } => turn % (dype as u64 + tsp as u64) < dype as u64,
            Schedule::Random { .. } => rng.as_mut().unwrap().gen_bool(0.5),
        };
        turn += 1;
        let step = if dype_turn {
            dw.step(crossed)?
        } else {
            tw.step(crossed)
        };
        match step {
            Step::Worked => {}
            Step::Expired => break,
            // Only reachable once the frontiers have crossed.
            Step::Idle => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::brute_force_best;

    fn check(game: &Game, g: &Graph, mode: DtspMode) -> SolverResult {
        let pt = Pseudotree::build(g, 0).unwrap();
        let want = brute_force_best(game, g, SolveOptions::default()).unwrap();
        let r = d_tsp(game, g, &pt, SolveOptions::default().with_mode(mode)).unwrap();
        assert_eq!(r.best_value, want.best_value, "{mode:?}");
        assert_eq!(r.status, Status::Optimal);
        assert!(r.frontier.unwrap().crossed());
        assert_eq!(r.stats.guard_fallbacks, 0);
        assert_eq!(r.best.value(game), r.best_value);
        r
    }

    #[test]
    fn two_agents() {
        let g = Graph::path(2).unwrap();
        let game = Game::from_table(2, vec![3, 4, 5]).unwrap();
        let r = check(&game, &g, DtspMode::default());
        assert_eq!(r.best_value, 7);
        assert_eq!(r.trace[0].value, 5);
    }

    #[test]
    fn single_agent_crosses_at_once() {
        let g = Graph::new(1, &[]).unwrap();
        let game = Game::from_table(1, vec![-2]).unwrap();
        let r = check(&game, &g, DtspMode::default());
        let f = r.frontier.unwrap();
        assert_eq!((f.dype_units, f.tsp_units), (0, 0));
    }

    #[test]
    fn schedules_agree() {
        let g = Graph::cycle(6).unwrap();
        let mut rng = crate::random::rng(4);
        let game = crate::random::random_table_game(6, &mut rng).unwrap();
        for mode in [
            DtspMode::Interleaved(Schedule::Alternate),
            DtspMode::Interleaved(Schedule::Ratio { dype: 1, tsp: 0 }),
            DtspMode::Interleaved(Schedule::Ratio { dype: 0, tsp: 1 }),
            DtspMode::Interleaved(Schedule::Ratio { dype: 1, tsp: 5 }),
            DtspMode::Interleaved(Schedule::Random { seed: 9 }),
            DtspMode::Parallel,
        ] {
            check(&game, &g, mode);
        }
    }

    #[test]
    fn stalled_search_leaves_all_work_to_the_dp() {
        let g = Graph::complete(5).unwrap();
        let game = Game::supersub(vec![3, 1, 4, 1, 5], 4).unwrap();
        let r = check(
            &game,
            &g,
            DtspMode::Interleaved(Schedule::Ratio { dype: 1, tsp: 0 }),
        );
        let f = r.frontier.unwrap();
        assert_eq!(f.tsp_units, 0);
        assert_eq!(f.dype_next, 1);
    }

    #[test]
    fn zero_ratio_is_rejected() {
        let g = Graph::path(3).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        let game = Game::from_table(3, vec![0; 7]).unwrap();
        let opts = SolveOptions::default()
            .with_mode(DtspMode::Interleaved(Schedule::Ratio { dype: 0, tsp: 0 }));
        assert_eq!(
            d_tsp(&game, &g, &pt, opts).unwrap_err(),
            SolveError::InvalidSchedule
        );
    }

    #[test]
    fn shortcut_fires_when_dp_runs_ahead() {
        let g = Graph::path(7).unwrap();
        let mut rng = crate::random::rng(1);
        let game = crate::random::random_table_game(7, &mut rng).unwrap();
        let r = check(
            &game,
            &g,
            DtspMode::Interleaved(Schedule::Ratio { dype: 3, tsp: 1 }),
        );
        assert!(r.stats.shortcuts > 0);
    }
}
