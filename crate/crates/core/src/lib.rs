//! Sparse regression for index tracking: Lasso, one-step thresholding, the
//! first PLS direction, and two PLS-integrated Lasso variants, with a
//! λ-sweep harness and command-line front end.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod diagnostics;
pub mod harness;
pub mod numerics;
pub mod solvers;

pub use numerics::Matrix;
pub use solvers::{FitResult, Method, SolverOptions};
