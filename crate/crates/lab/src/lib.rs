//! Experiments, file formats and the command-line driver built on
//! `conflimit-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod formats;
pub mod report;

pub use error::{LabError, LabResult};
