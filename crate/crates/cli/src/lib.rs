//! Harness library: state-file I/O, verification suites, reports.

pub mod report;
pub mod stateio;
pub mod suites;
