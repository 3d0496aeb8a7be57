//! Scenario files, expression parsing, the identity suite runner and JSON
//! reports for `excalc-core`.

#![allow(clippy::needless_range_loop)]

pub mod checks;
pub mod error;
pub mod expr;
pub mod report;
pub mod scenario;
pub mod suite;

pub use checks::Check;
pub use error::ConfigError;
pub use report::{emit_report, Report};
pub use scenario::Scenario;
pub use suite::{run_suite, Overrides, Plan};
