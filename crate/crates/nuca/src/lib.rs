//! File formats, reports and the command-line driver on top of `nuca-core`.

pub mod cli;
pub mod exec;
pub mod pgm;
pub mod report;
pub mod schema;
