//! Configuration, command orchestration and reports for `wallcross-core`.
//!
//! Reports are JSON with sorted keys and fixed float formatting; rerunning a
//! command on the same config gives the same bytes.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{Command, Config};
pub use error::CliError;
pub use report::Report;
pub use run::run;

/// Exit status for a finished report.
pub fn exit_status(report: &Report) -> i32 {
    if report.pass() {
        0
    } else {
        1
    }
}
