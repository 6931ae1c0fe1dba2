#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! File formats, configuration and benchmark plumbing behind the `ibpdca` binary.

pub mod bench;
pub mod config;
pub mod io;
pub mod runner;
pub mod trace;
