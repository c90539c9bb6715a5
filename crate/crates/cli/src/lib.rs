//! Command-line front end: model files, bundled models, dispatch and reports.

pub mod commands;
pub mod model;
pub mod registry;
pub mod report;

pub use commands::{run, Outcome};
