//! Command-line front end for `locfaults-core`: argument handling, report
//! rendering, CFG dumps and the benchmark harness.

pub mod args;
pub mod bench;
pub mod ce;
pub mod dot;
pub mod error;
pub mod report;
pub mod run;

pub use error::CliError;
pub use run::{main_with_args, Outcome};
