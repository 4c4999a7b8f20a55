//! Command-line harness: builtin examples, problem sources and activation
//! sweeps that write trajectories and a JSON summary.

pub mod builtin;
pub mod config;
pub mod experiment;

pub use builtin::{load_builtin, Builtin};
pub use config::{default_seed, parse_vector, ExperimentConfig, ProblemSource, ResolvedConfig, X0Source};
pub use experiment::{report_table, run_experiment, run_one, RunSummary, Summary};
