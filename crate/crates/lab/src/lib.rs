//! Command-line laboratory on top of `peelab-core`: experiment runners,
//! replica fan-out, and the CSV, JSON and edge-list formats.

pub mod cli;
pub mod commands;
pub mod edgelist;
pub mod error;
pub mod output;
pub mod parallel;

pub use cli::Cli;
pub use commands::{run, Outcome};
pub use error::{LabError, LabResult};

/// Exit status when a resource cap cut a run short.
pub const EXIT_TRUNCATED: i32 = 3;
