//! Command-line front end for the split-problem stability toolkit: problem
//! files in JSON, machine-readable certificates and reports, deterministic
//! exit codes.

pub mod commands;
pub mod report;
pub mod spec_file;
