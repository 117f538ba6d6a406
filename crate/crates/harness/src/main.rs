use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use csg_core::{Algorithm, DtspMode, Schedule, SolveError, Status};
use csg_harness::bench::{check_consistency, run_bench, BenchConfig};
use csg_harness::trace::write_trace;
use csg_harness::verify::{verify, Fault, VerifyConfig};
use csg_harness::{
    gen_instance, parse_instance, solve_instance, BoundKind, GameKind, Model, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "csg",
    version,
    about = "Coalition structure generation on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Interleaved,
    Parallel,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance.
    Gen {
        /// path, cycle, star, complete or gnp:<p>
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        /// table or supersub
        #[arg(long, default_value = "table")]
        game: GameKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pin the pseudotree root.
        #[arg(long)]
        root: Option<usize>,
        /// Output file; standard output if absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "dype")]
        algorithm: Algorithm,
        /// none or supersub
        #[arg(long, default_value = "none")]
        bound: BoundKind,
        #[arg(long, value_enum, default_value = "interleaved")]
        mode: Mode,
        /// Interleave d-tsp's workers by a seeded coin instead of alternating.
        #[arg(long)]
        seed: Option<u64>,
        /// Wall-clock budget in milliseconds.
        #[arg(long)]
        budget: Option<u64>,
        /// Trace CSV for anytime algorithms.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compare every solver with the brute-force optimum.
    Verify {
        /// Comma-separated graph models.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "path,cycle,star,complete,gnp:0.2,gnp:0.5,gnp:0.8"
        )]
        models: Vec<Model>,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 9)]
        n_max: usize,
        /// Instances per model and size.
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// First instance seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "table")]
        game: GameKind,
        /// Deliberately break a solver (tsp-bound-sign).
        #[arg(long)]
        inject_fault: Option<Fault>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Time algorithms on instance files and write a CSV report.
    Bench {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "dype,tsp,dype-star,d-tsp,cfss"
        )]
        algorithms: Vec<Algorithm>,
        #[arg(long, default_value_t = 1)]
        repetitions: u32,
        /// Per-run budget in milliseconds.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value = "none")]
        bound: BoundKind,
        #[arg(long, value_enum, default_value = "interleaved")]
        mode: Mode,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long, default_value = "bench-out")]
        out: PathBuf,
    },
}

enum Failure {
    Mismatch(String),
    Usage(String),
    Instance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Instance(_) => 3,
        }
    }
}

fn dtsp_mode(mode: Mode, seed: Option<u64>) -> DtspMode {
    match (mode, seed) {
        (Mode::Parallel, _) => DtspMode::Parallel,
        (Mode::Interleaved, None) => DtspMode::Interleaved(Schedule::Alternate),
        (Mode::Interleaved, Some(seed)) => DtspMode::Interleaved(Schedule::Random { seed }),
    }
}

fn load(path: &PathBuf) -> Result<csg_harness::Instance, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Instance(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::Instance(format!("{}: {e}", path.display())))
}

fn solve_error(e: SolveError) -> Failure {
    match e {
        SolveError::InvalidSchedule => Failure::Usage(e.to_string()),
        _ => Failure::Instance(e.to_string()),
    }
}

/// A closed pipe is not an error worth panicking over.
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen {
            model,
            n,
            game,
            seed,
            root,
            out,
        } => {
            let mut inst =
                gen_instance(model, n, game, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(r) = root {
                inst = csg_harness::Instance::new(inst.graph, inst.spec, Some(r))
                    .map_err(|e| Failure::Usage(e.to_string()))?;
            }
            let text = inst.to_text();
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| Failure::Instance(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
        }
        Command::Solve {
            instance,
            algorithm,
            bound,
            mode,
            seed,
            budget,
            trace,
        } => {
            let inst = load(&instance)?;
            let cfg = RunConfig {
                algorithm,
                bound: bound.get(),
                mode: dtsp_mode(mode, seed),
                deadline: budget.map(|ms| Instant::now() + Duration::from_millis(ms)),
            };
            let r = solve_instance(&inst, &cfg).map_err(solve_error)?;
            let mut out = String::new();
            let _ = writeln!(out, "value {}", r.best_value);
            let _ = writeln!(
                out,
                "status {}",
                match r.status {
                    Status::Optimal => "optimal",
                    Status::Interrupted => "timeout",
                }
            );
            let _ = writeln!(out, "structure {}", r.best);
            let s = r.stats;
            let _ = writeln!(
                out,
                "stats subsets={} dp_entries={} expanded={} pruned={} structures={} shortcuts={} guard_fallbacks={}",
                s.subsets_enumerated,
                s.dp_entries,
                s.nodes_expanded,
                s.nodes_pruned,
                s.structures_visited,
                s.shortcuts,
                s.guard_fallbacks
            );
            let _ = writeln!(out, "elapsed_us {}", r.elapsed.as_micros());
            emit(&out);
            if let Some(path) = trace {
                if algorithm.is_anytime() {
                    write_trace(&path, &r.trace)
                        .map_err(|e| Failure::Instance(format!("{}: {e}", path.display())))?;
                } else {
                    eprintln!("note: {algorithm} is not anytime; no trace written");
                }
            }
        }
        Command::Verify {
            models,
            n_min,
            n_max,
            seeds,
            seed,
            game,
            inject_fault,
            threads,
        } => {
            if n_min == 0 || n_min > n_max || n_max > csg_core::solvers::ORACLE_CAP {
                return Err(Failure::Usage(format!(
                    "need 1 <= n-min <= n-max <= {}",
                    csg_core::solvers::ORACLE_CAP
                )));
            }
            let report = verify(&VerifyConfig {
                models,
                n_min,
                n_max,
                seeds,
                base_seed: seed,
                game,
                fault: inject_fault,
                threads,
            });
            let mut out = String::new();
            for f in &report.failures {
                let _ = writeln!(out, "FAIL {f}");
            }
            let _ = writeln!(
                out,
                "{} instances, {} runs, {} failures",
                report.instances,
                report.runs,
                report.failures.len()
            );
            emit(&out);
            if !report.passed() {
                return Err(Failure::Mismatch("verification failed".into()));
            }
        }
        Command::Bench {
            instances,
            algorithms,
            repetitions,
            budget,
            bound,
            mode,
            seed,
            out,
        } => {
            let mut loaded = Vec::new();
            for path in &instances {
                let id = path.file_stem().map_or_else(
                    || path.display().to_string(),
                    |s| s.to_string_lossy().into_owned(),
                );
                loaded.push((id, load(path)?));
            }
            let rows = run_bench(&BenchConfig {
                instances: loaded,
                algorithms,
                repetitions,
                budget: budget.map(Duration::from_millis),
                bound,
                mode: dtsp_mode(mode, seed),
                out_dir: out.clone(),
            })
            .map_err(|e| Failure::Instance(e.to_string()))?;
            println!("{} runs written to {}", rows.len(), out.display());
            check_consistency(&rows).map_err(Failure::Mismatch)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Mismatch(m) | Failure::Usage(m) | Failure::Instance(m) => {
                    eprintln!("error: {m}")
                }
            }
            ExitCode::from(f.code())
        }
    }
}
