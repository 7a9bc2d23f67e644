//! Command-line front end for duplication-attachment likelihood estimation:
//! settings, edge-list I/O, experiment drivers and CSV/manifest output.

pub mod commands;
pub mod edgelist;
pub mod error;
pub mod experiments;
pub mod output;
pub mod settings;
pub mod stats;
