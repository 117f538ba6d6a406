//! Benchmark sweeps: instances × algorithms × repetitions.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use csg_core::{Algorithm, DtspMode, SolveError, Status, Value};

use crate::instance::Instance;
use crate::run::{solve_instance, BoundKind, RunConfig};
use crate::trace::write_trace;

pub const REPORT_FILE: &str = "report.csv";
pub const TRACE_DIR: &str = "traces";

#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// `(id, instance)`; ids name the trace files.
    pub instances: Vec<(String, Instance)>,
    pub algorithms: Vec<Algorithm>,
    pub repetitions: u32,
    /// Wall-clock budget per run.
    pub budget: Option<Duration>,
    pub bound: BoundKind,
    pub mode: DtspMode,
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Complete,
    /// Budget ran out; the value is the incumbent at cutoff.
    Timeout,
    /// Budget ran out on a solver with no interim answer.
    Incomplete,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Complete => "complete",
            RunStatus::Timeout => "timeout",
            RunStatus::Incomplete => "incomplete",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: Algorithm,
    pub repetition: u32,
    pub status: RunStatus,
    pub best_value: Option<Value>,
    pub wall_us: u64,
    pub subsets: u64,
    pub dp_entries: u64,
    pub expanded: u64,
    pub pruned: u64,
    /// Relative to the output directory.
    pub trace_file: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{algorithm} on {instance}: {source}")]
    Solve {
        instance: String,
        algorithm: Algorithm,
        source: SolveError,
    },
}

pub const HEADER: [&str; 10] = [
    "instance",
    "algorithm",
    "repetition",
    "status",
    "best_value",
    "wall_us",
    "subsets",
    "dp_entries",
    "expanded",
    "pruned",
];

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    let trace_dir = cfg.out_dir.join(TRACE_DIR);
    fs::create_dir_all(&trace_dir).map_err(|source| BenchError::Io {
        path: trace_dir.clone(),
        source,
    })?;
    let mut rows = Vec::new();
    for (id, inst) in &cfg.instances {
        for &algorithm in &cfg.algorithms {
            for repetition in 0..cfg.repetitions {
                let started = Instant::now();
                let run = RunConfig {
                    algorithm,
                    bound: cfg.bound.get(),
                    mode: cfg.mode,
                    deadline: cfg.budget.map(|b| started + b),
                };
                let outcome = solve_instance(inst, &run);
                let wall_us = started.elapsed().as_micros() as u64;
                let row = match outcome {
                    Ok(r) => {
                        let trace_file = if algorithm.is_anytime() {
                            let name = PathBuf::from(TRACE_DIR).join(format!(
                                "{}__{}__{}.csv",
                                sanitize(id),
                                algorithm,
                                repetition
                            ));
                            let path = cfg.out_dir.join(&name);
                            write_trace(&path, &r.trace)
                                .map_err(|source| BenchError::Csv { path, source })?;
                            Some(name)
                        } else {
                            None
                        };
                        BenchRow {
                            instance: id.clone(),
                            algorithm,
                            repetition,
                            status: match r.status {
                                Status::Optimal => RunStatus::Complete,
                                Status::Interrupted => RunStatus::Timeout,
                            },
                            best_value: Some(r.best_value),
                            wall_us,
                            subsets: r.stats.subsets_enumerated,
                            dp_entries: r.stats.dp_entries,
                            expanded: r.stats.nodes_expanded,
                            pruned: r.stats.nodes_pruned,
                            trace_file,
                        }
                    }
                    Err(SolveError::BudgetExhausted) => BenchRow {
                        instance: id.clone(),
                        algorithm,
                        repetition,
                        status: RunStatus::Incomplete,
                        best_value: None,
                        wall_us,
                        subsets: 0,
                        dp_entries: 0,
                        expanded: 0,
                        pruned: 0,
                        trace_file: None,
                    },
                    Err(source) => {
                        return Err(BenchError::Solve {
                            instance: id.clone(),
                            algorithm,
                            source,
                        })
                    }
                };
                rows.push(row);
            }
        }
    }
    let path = cfg.out_dir.join(REPORT_FILE);
    write_report(&path, &rows).map_err(|source| BenchError::Csv { path, source })?;
    Ok(rows)
}

pub fn write_report(path: &Path, rows: &[BenchRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.algorithm.to_string(),
            r.repetition.to_string(),
            r.status.to_string(),
            r.best_value.map(|v| v.to_string()).unwrap_or_default(),
            r.wall_us.to_string(),
            r.subsets.to_string(),
            r.dp_entries.to_string(),
            r.expanded.to_string(),
            r.pruned.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// All complete runs of one instance report the same value.
pub fn check_consistency(rows: &[BenchRow]) -> Result<(), String> {
    let mut seen: Vec<(&str, Value, Algorithm)> = Vec::new();
    for r in rows.iter().filter(|r| r.status == RunStatus::Complete) {
        let v = r.best_value.expect("complete runs have a value");
        match seen.iter().find(|s| s.0 == r.instance) {
            Some(&(_, w, alg)) if w != v => {
                return Err(format!(
                    "{}: {} found {v} but {alg} found {w}",
                    r.instance, r.algorithm
                ))
            }
            Some(_) => {}
            None => seen.push((&r.instance, v, r.algorithm)),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_instance, GameKind, Model};
    use crate::trace::read_trace;

    fn config(dir: &Path, budget: Option<Duration>) -> BenchConfig {
        BenchConfig {
            instances: vec![(
                "c6".into(),
                gen_instance(Model::Cycle, 6, GameKind::Table, 2).unwrap(),
            )],
            algorithms: vec![
                Algorithm::DypeStar,
                Algorithm::DTsp,
                Algorithm::Dype,
                Algorithm::Cfss,
            ],
            repetitions: 3,
            budget,
            bound: BoundKind::None,
            mode: DtspMode::default(),
            out_dir: dir.to_path_buf(),
        }
    }

    #[test]
    fn anytime_traces_end_at_the_same_value() {
        let dir = tempfile::tempdir().unwrap();
        let rows = run_bench(&config(dir.path(), None)).unwrap();
        assert_eq!(rows.len(), 12);
        check_consistency(&rows).unwrap();
        let ends: Vec<Value> = rows
            .iter()
            .filter_map(|r| r.trace_file.as_ref())
            .map(|f| read_trace(&dir.path().join(f)).unwrap().last().unwrap().1)
            .collect();
        assert_eq!(ends.len(), 9);
        assert!(ends.windows(2).all(|w| w[0] == w[1]));
        assert!(dir.path().join(REPORT_FILE).exists());
    }

    #[test]
    fn zero_budget() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), Some(Duration::ZERO));
        let inst = cfg.instances[0].1.clone();
        let rows = run_bench(&cfg).unwrap();
        let v_all = inst.game().value(inst.graph.agents());
        let singles: Value = (0..6)
            .map(|a| inst.game().value(csg_core::AgentSet::singleton(a)))
            .sum();
        for r in rows {
            match r.algorithm {
                Algorithm::DypeStar | Algorithm::DTsp => {
                    assert_eq!(r.status, RunStatus::Timeout);
                    assert_eq!(r.best_value, Some(v_all));
                }
                Algorithm::Cfss => {
                    assert_eq!(r.status, RunStatus::Timeout);
                    assert_eq!(r.best_value, Some(singles));
                }
                _ => {
                    assert_eq!(r.status, RunStatus::Incomplete);
                    assert_eq!(r.best_value, None);
                }
            }
        }
    }

    #[test]
    fn inconsistency_is_reported() {
        let row = |alg, v| BenchRow {
            instance: "x".into(),
            algorithm: alg,
            repetition: 0,
            status: RunStatus::Complete,
            best_value: Some(v),
            wall_us: 0,
            subsets: 0,
            dp_entries: 0,
            expanded: 0,
            pruned: 0,
            trace_file: None,
        };
        assert!(check_consistency(&[row(Algorithm::Dype, 3), row(Algorithm::Tsp, 3)]).is_ok());
        assert!(check_consistency(&[row(Algorithm::Dype, 3), row(Algorithm::Tsp, 4)]).is_err());
    }
}
