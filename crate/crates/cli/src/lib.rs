//! Command-line front end for `ovalflow-core`: configuration, the experiment pipeline,
//! persistence and figures.

// negated comparisons are kept on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod figures;
pub mod pipeline;
