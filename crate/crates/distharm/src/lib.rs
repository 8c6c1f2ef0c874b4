//! Scene files, report rendering and the command implementations behind
//! the `distharm` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod output;
pub mod radial;
pub mod report;
pub mod scene_file;
pub mod verify;

pub use error::{CliError, Result};
