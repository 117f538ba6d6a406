//! Optimal coalition structure generation on graphs.
//!
//! Agents sit on the nodes of an undirected graph, and a coalition is
//! admissible only if it induces a connected subgraph. Given a value for
//! every coalition, the solvers here find a partition of all agents into
//! admissible coalitions with the largest total value.
//!
//! ```
//! use csg_core::{solve, Algorithm, Game, Graph, Pseudotree, SolveOptions};
//!
//! let graph = Graph::cycle(4).unwrap();
//! let game = Game::supersub(vec![2, 1, 0, 3], 1).unwrap();
//! let pt = Pseudotree::build(&graph, 0).unwrap();
//! let r = solve(Algorithm::Dype, &game, &graph, &pt, SolveOptions::default()).unwrap();
//! assert!(r.best.is_feasible_structure(&graph));
//! assert_eq!(r.best.value(&game), r.best_value);
//! ```

pub mod agents;
pub mod enumerate;
pub mod game;
pub mod graph;
pub mod pseudotree;
pub mod random;
pub mod solvers;

pub use agents::{AgentSet, MAX_AGENTS};
pub use enumerate::{connected_subsets_by_filter, ConnectedSubsets};
pub use game::{
    upper_bound_cfss, upper_bound_tsp, Game, GameError, Partition, PartitionError, Value,
    MAX_TABLE_AGENTS,
};
pub use graph::{Graph, GraphError};
pub use pseudotree::{Pseudotree, PseudotreeError};
pub use solvers::{
    solve, Algorithm, DtspMode, Frontier, Improvement, NoBound, Schedule, SearchBound, SolveError,
    SolveOptions, SolverResult, Stats, Status, SuperSubBound, TracePoint,
};
