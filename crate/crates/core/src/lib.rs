//! Measure how far first-order methods drift under inexact gradients and
//! starting points, on the lower-bound constructions and on random instances.

// `!(x > 0.0)` also rejects NaN; indexed loops mirror the linear algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod costs;
mod error;
pub mod lab;
pub mod oracles;
mod rng;
pub mod scenarios;
pub mod solvers;
mod vector;

pub use error::{Error, Result};
pub use rng::{derive_rng, RngState, StreamRng, ALGORITHM_ID};
pub use vector::{project_ball, Vector};
