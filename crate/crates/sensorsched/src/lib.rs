//! Scheduling costly observations of scalar Gaussian time series.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandit;
pub mod cost;
pub mod dynamics;
pub mod error;
mod ext;
pub mod index;
pub mod lqg;
pub mod oracle;
pub mod words;

pub use error::{Error, Result};
