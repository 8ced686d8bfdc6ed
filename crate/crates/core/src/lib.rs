//! Computational tools for irregularities of distribution.
//!
//! The crate is organised around the objects of Roth's orthogonal function
//! method:
//!
//! - [`pointset`]: point distributions in `[0,1]^d`, digital nets and their
//!   verifiers, and the corner-collapse transform.
//! - [`discrepancy`]: pointwise evaluation of the discrepancy function
//!   `D_N(x) = #(P ∩ [0,x)) - N|[0,x)|`, the exact L² norm and Monte-Carlo
//!   L^p and Orlicz (Luxemburg) norms.
//! - [`haar`]: exact Haar coefficients of `D_N`, shape vectors and
//!   r-functions (generalized Rademacher functions).
//! - [`testfn`]: the composite test functions `Z`, the dichotomy `Y` and the
//!   sine `Y`, with inner products and tail estimates.
//! - [`experiment`]: configurable sweeps producing reproducible reports.
//!
//! Every randomized quantity is a deterministic function of an explicit seed,
//! and every floating-point reduction uses a fixed block decomposition so
//! results do not depend on the number of worker threads.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod discrepancy;
mod error;
pub mod experiment;
pub mod haar;
pub mod mc;
pub mod pointset;
pub mod sum;
pub mod testfn;

pub use error::{Error, Result};
pub use pointset::PointSet;
