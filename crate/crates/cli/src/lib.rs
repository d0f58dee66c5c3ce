//! Command-line front end: file formats, reports and the parallel
//! compatibility runner on top of `losc-core`.

pub mod commands;
pub mod meta;
pub mod report;
pub mod text;
pub mod verify;

use std::fmt;

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// A usage or input error (exit status 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError(pub String);

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}
