//! Oracle verification over a matrix of generated instances.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use csg_core::solvers::NoBound;
use csg_core::{
    upper_bound_tsp, AgentSet, Algorithm, DtspMode, Game, Pseudotree, Schedule, SearchBound,
    SolveError, Status, SuperSubBound, Value,
};

use crate::gen::{gen_instance, GameKind, Model};
use crate::instance::Instance;
use crate::run::{solve_instance, RunConfig};

/// Deliberate bugs for checking that verification catches them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// The tree-search bound comes back negated, and hugely negative where
    /// there is no bound at all.
    TspBoundSign,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tsp-bound-sign" => Ok(Fault::TspBoundSign),
            _ => Err(format!("unknown fault '{s}' (tsp-bound-sign)")),
        }
    }
}

pub struct SignFlipped;

impl SearchBound for SignFlipped {
    fn tsp(&self, game: &Game, partial_value: Value, remainder: AgentSet) -> Option<Value> {
        Some(match upper_bound_tsp(game, partial_value, remainder) {
            Ok(ub) => -ub,
            Err(_) => Value::MIN / 4,
        })
    }

    fn cfss(&self, _: &Game, _: &[AgentSet], _: &[AgentSet]) -> Option<Value> {
        None
    }
}

/// One solver configuration of the matrix.
#[derive(Clone, Copy)]
pub struct Entrant {
    pub label: &'static str,
    pub algorithm: Algorithm,
    pub bound: &'static dyn SearchBound,
    pub mode: DtspMode,
}

pub const LINEUP: [Entrant; 7] = [
    Entrant {
        label: "dype",
        algorithm: Algorithm::Dype,
        bound: &NoBound,
        mode: DtspMode::Interleaved(Schedule::Alternate),
    },
    Entrant {
        label: "tsp/none",
        algorithm: Algorithm::Tsp,
        bound: &NoBound,
        mode: DtspMode::Interleaved(Schedule::Alternate),
    },
    Entrant {
        label: "tsp/supersub",
        algorithm: Algorithm::Tsp,
        bound: &SuperSubBound,
        mode: DtspMode::Interleaved(Schedule::Alternate),
    },
    Entrant {
        label: "dype-star",
        algorithm: Algorithm::DypeStar,
        bound: &NoBound,
        mode: DtspMode::Interleaved(Schedule::Alternate),
    },
    Entrant {
        label: "d-tsp/interleaved",
        algorithm: Algorithm::DTsp,
        bound: &NoBound,
        mode: DtspMode::Interleaved(Schedule::Alternate),
    },
    Entrant {
        label: "d-tsp/parallel",
        algorithm: Algorithm::DTsp,
        bound: &NoBound,
        mode: DtspMode::Parallel,
    },
    Entrant {
        label: "cfss/none",
        algorithm: Algorithm::Cfss,
        bound: &NoBound,
        mode: DtspMode::Interleaved(Schedule::Alternate),
    },
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    Generate(String),
    Error(SolveError),
    Value {
        expected: Value,
        got: Value,
    },
    NotOptimal,
    Infeasible,
    /// Reported value differs from the value of the reported structure.
    Inconsistent {
        reported: Value,
        actual: Value,
    },
    TraceNotIncreasing,
    TraceStart {
        expected: Value,
        got: Value,
    },
    TraceEnd {
        expected: Value,
        got: Value,
    },
    NotCrossed,
    GuardFallbacks(u64),
    Audit(String),
}

impl Problem {
    /// Which acceptance property the problem violates.
    pub fn property(&self) -> &'static str {
        match self {
            Problem::Generate(_)
            | Problem::Error(_)
            | Problem::Value { .. }
            | Problem::NotOptimal
            | Problem::Infeasible
            | Problem::Inconsistent { .. } => "oracle",
            Problem::TraceNotIncreasing | Problem::TraceStart { .. } | Problem::TraceEnd { .. } => {
                "anytime"
            }
            Problem::NotCrossed | Problem::GuardFallbacks(_) => "frontier",
            Problem::Audit(_) => "audit",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Generate(e) => write!(f, "instance generation failed: {e}"),
            Problem::Error(e) => write!(f, "error: {e}"),
            Problem::Value { expected, got } => write!(f, "value {got}, oracle {expected}"),
            Problem::NotOptimal => f.write_str("finished without an optimality claim"),
            Problem::Infeasible => {
                f.write_str("structure is not a partition into connected blocks")
            }
            Problem::Inconsistent { reported, actual } => {
                write!(f, "reported value {reported}, structure is worth {actual}")
            }
            Problem::TraceNotIncreasing => f.write_str("trace values do not increase"),
            Problem::TraceStart { expected, got } => {
                write!(f, "trace starts at {got}, expected v(A) = {expected}")
            }
            Problem::TraceEnd { expected, got } => {
                write!(f, "trace ends at {got}, expected {expected}")
            }
            Problem::NotCrossed => f.write_str("frontiers did not cross"),
            Problem::GuardFallbacks(k) => write!(f, "table guard fell back {k} times"),
            Problem::Audit(e) => write!(f, "table audit: {e}"),
        }
    }
}

/// Checks every entrant on one instance against the oracle.
pub fn check_instance(
    inst: &Instance,
    fault: Option<Fault>,
) -> Result<Vec<(&'static str, Problem)>, SolveError> {
    let game = inst.game();
    let graph = &inst.graph;
    let oracle = solve_instance(inst, &RunConfig::new(Algorithm::Oracle))?;
    let v_all = game.value(graph.agents());
    let mut problems = Vec::new();
    for e in LINEUP {
        let bound: &dyn SearchBound = match fault {
            Some(Fault::TspBoundSign) if e.label == "tsp/supersub" => &SignFlipped,
            _ => e.bound,
        };
        let cfg = RunConfig {
            algorithm: e.algorithm,
            bound,
            mode: e.mode,
            deadline: None,
        };
        let r = match solve_instance(inst, &cfg) {
            Ok(r) => r,
            Err(err) => {
                problems.push((e.label, Problem::Error(err)));
                continue;
            }
        };
        let mut report = |p| problems.push((e.label, p));
        if r.best_value != oracle.best_value {
            report(Problem::Value {
                expected: oracle.best_value,
                got: r.best_value,
            });
        }
        if r.status != Status::Optimal {
            report(Problem::NotOptimal);
        }
        if !r.best.is_feasible_structure(graph) {
            report(Problem::Infeasible);
        }
        let actual = r.best.value(game);
        if actual != r.best_value {
            report(Problem::Inconsistent {
                reported: r.best_value,
                actual,
            });
        }
        if e.algorithm == Algorithm::DypeStar || e.algorithm == Algorithm::DTsp {
            if !r.trace.windows(2).all(|w| w[0].value < w[1].value) {
                report(Problem::TraceNotIncreasing);
            }
            let first = r.trace.first().map(|t| t.value);
            if first != Some(v_all) && graph.is_connected_graph() {
                report(Problem::TraceStart {
                    expected: v_all,
                    got: first.unwrap_or(Value::MIN),
                });
            }
            let last = r.trace.last().map_or(Value::MIN, |t| t.value);
            if last != oracle.best_value {
                report(Problem::TraceEnd {
                    expected: oracle.best_value,
                    got: last,
                });
            }
        }
        let whole = graph.is_connected_graph();
        if e.algorithm == Algorithm::DTsp && whole && !r.frontier.is_some_and(|f| f.crossed()) {
            report(Problem::NotCrossed);
        }
        if r.stats.guard_fallbacks > 0 {
            report(Problem::GuardFallbacks(r.stats.guard_fallbacks));
        }
        if matches!(e.algorithm, Algorithm::Dype | Algorithm::DypeStar) {
            match &r.table {
                Some(table) => {
                    let pt = Pseudotree::build(graph, inst.root.unwrap_or(0)).expect("connected");
                    if let Err(err) = table.audit(game, graph, &pt) {
                        report(Problem::Audit(err.to_string()));
                    }
                }
                None if whole => report(Problem::Audit("no table returned".into())),
                None => {}
            }
        }
    }
    Ok(problems)
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub models: Vec<Model>,
    pub n_min: usize,
    pub n_max: usize,
    /// Instances per `(model, n)`; seeds `base_seed .. base_seed + seeds`.
    pub seeds: u64,
    pub base_seed: u64,
    pub game: GameKind,
    pub fault: Option<Fault>,
    /// Worker threads; `0` picks the available parallelism.
    pub threads: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            models: Model::MATRIX.to_vec(),
            n_min: 1,
            n_max: 9,
            seeds: 100,
            base_seed: 0,
            game: GameKind::Table,
            fault: None,
            threads: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub model: Model,
    pub n: usize,
    pub seed: u64,
    pub game: GameKind,
    pub solver: &'static str,
    pub problem: Problem,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on {} n={} seed={}: {} (reproduce: csg gen --model {} --n {} --game {} --seed {})",
            self.solver,
            self.model,
            self.n,
            self.seed,
            self.problem,
            self.model,
            self.n,
            self.game,
            self.seed
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub instances: u64,
    pub runs: u64,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_of(&self, property: &str) -> impl Iterator<Item = &Failure> {
        let property = property.to_owned();
        self.failures
            .iter()
            .filter(move |f| f.problem.property() == property)
    }
}

pub fn verify(cfg: &VerifyConfig) -> VerifyReport {
    let mut work = Vec::new();
    for (mi, &model) in cfg.models.iter().enumerate() {
        for n in cfg.n_min..=cfg.n_max {
            for s in 0..cfg.seeds {
                work.push((mi, model, n, cfg.base_seed + s));
            }
        }
    }
    let threads = match cfg.threads {
        0 => thread::available_parallelism().map_or(1, |n| n.get()),
        t => t,
    };
    let next = AtomicUsize::new(0);
    let failures = Mutex::new(Vec::new());
    thread::scope(|s| {
        for _ in 0..threads.min(work.len()).max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(mi, model, n, seed)) = work.get(i) else {
                    break;
                };
                let found = run_one(model, n, seed, cfg);
                if !found.is_empty() {
                    let mut all = failures.lock().unwrap();
                    all.extend(found.into_iter().map(|(solver, problem)| {
                        (
                            mi,
                            Failure {
                                model,
                                n,
                                seed,
                                game: cfg.game,
                                solver,
                                problem,
                            },
                        )
                    }));
                }
            });
        }
    });
    let mut failures = failures.into_inner().unwrap();
    failures.sort_by_key(|(mi, f)| (*mi, f.n, f.seed));
    VerifyReport {
        instances: work.len() as u64,
        runs: work.len() as u64 * (LINEUP.len() as u64 + 1),
        failures: failures.into_iter().map(|(_, f)| f).collect(),
    }
}

fn run_one(model: Model, n: usize, seed: u64, cfg: &VerifyConfig) -> Vec<(&'static str, Problem)> {
    let inst = match gen_instance(model, n, cfg.game, seed) {
        Ok(inst) => inst,
        Err(e) => return vec![("gen", Problem::Generate(e.to_string()))],
    };
    match check_instance(&inst, cfg.fault) {
        Ok(p) => p,
        Err(e) => vec![("oracle", Problem::Error(e))],
    }
}
