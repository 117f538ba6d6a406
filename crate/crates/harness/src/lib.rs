//! Instance files, generators, oracle verification and benchmark sweeps
//! around `csg-core`.

pub mod bench;
pub mod gen;
pub mod instance;
pub mod run;
pub mod trace;
pub mod verify;

pub use gen::{gen_instance, GameKind, Model};
pub use instance::{parse_instance, write_instance, GameSpec, Instance, InstanceError};
pub use run::{solve_instance, BoundKind, RunConfig};
