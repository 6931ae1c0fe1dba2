//! Difference-of-convex programming with inertial Bregman proximal steps.
//!
//! The crate solves problems of the form
//!
//! ```text
//! min_x  f(x) - g(x) + h(x),      h = h⁺ - h⁻
//! ```
//!
//! with three solvers:
//!
//! * [`solver::ibpdca_run`]: extrapolated iterate, a proximal conjugate step for the
//!   subgradient of `g`, and a Bregman proximal step in `x`.
//! * [`solver::bpdca_run`]: the same loop without extrapolation.
//! * [`admm::admm_dca_run`]: classical DCA whose convex subproblem is solved by an inner ADMM.
//!
//! Concrete models for low-rank matrix completion and low-tubal-rank tensor completion live
//! in [`problems`]. Everything is `no_std` + `alloc`; file IO and the command line front end
//! live in the companion `ibpdca` crate.
//!
//! ```
//! use ibpdca_core::data::gen_matrix_instance;
//! use ibpdca_core::metrics::rse;
//! use ibpdca_core::problems::MatrixCompletionProblem;
//! use ibpdca_core::solver::{ibpdca_run, SolverConfig};
//!
//! let inst = gen_matrix_instance(20, 20, 2, 0.6, 3).unwrap();
//! let problem = MatrixCompletionProblem::new(inst.observed.clone(), inst.mask.clone(), 0.5, 1.1).unwrap();
//! let out = ibpdca_run(&problem, &SolverConfig::default(), &inst.observed).unwrap();
//! assert!(rse(&out.x, &inst.truth).unwrap() < 0.1);
//! ```
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod admm;
pub mod data;
mod error;
pub mod linalg;
mod math;
pub mod metrics;
pub mod problems;
pub mod prox;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::{Array, ComplexTensor3, DenseMatrix, SvdResult, TSvd, Tensor3};
