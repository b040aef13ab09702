//! Verification suite, tensor evaluation and JSON reports for `rheojet-core`.

pub mod checks;
pub mod config;
pub mod error;
pub mod eval;
pub mod report;
pub mod suite;

pub use config::{HSelector, MetricSelector, VerifyConfig};
pub use error::VerifyError;
pub use eval::{eval_tensor, parse_point, TENSOR_NAMES};
pub use report::{CheckRecord, GeometryReport};
pub use rheojet_core::fd::{fd_partial, Axis};
pub use suite::{run_suite, run_suite_on};
