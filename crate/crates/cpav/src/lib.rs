//! Command-line companion to `cpav-core`: report formats, a count-table
//! cache and rayon-parallel versions of the long-running loops.

pub mod cache;
pub mod cli;
pub mod parallel;
pub mod report;
