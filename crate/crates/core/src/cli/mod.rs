//! Command-line front end: problem files, built-in instances, run modes.

#[cfg(feature = "cli")]
mod app;
pub mod builtins;
pub mod file;
#[cfg(feature = "cli")]
pub mod run;

#[cfg(feature = "cli")]
pub use app::*;
pub use builtins::{builtin, builtin_problem, BuiltinError};
pub use file::{FileError, ProblemFile};
#[cfg(feature = "cli")]
pub use run::{ndjson, render_table, run, Mode, RunConfig, RunError, RunReport};
