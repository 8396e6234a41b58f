//! Command-line front end for the `jetlie` symmetry engine.

pub mod commands;
pub mod config;
pub mod report;

use jetlie::engine::EngineError;
use jetlie::fields::FieldError;
use jetlie::group::GroupError;
use jetlie::lie::LieError;
use thiserror::Error;

pub use config::{Format, ParamValue, RunConfig};
pub use report::{ClaimDiff, Report};

/// Failures that prevent a verdict. All of them exit with code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

impl CliError {
    pub const EXIT_CODE: i32 = 2;
}
