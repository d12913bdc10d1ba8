//! File formats, analysis reports and the command-line interface built on
//! [`peirce_core`].

pub use peirce_core as core;

pub mod cli;
pub mod format;
pub mod report;
