//! Numerical kernels for the semi-discrete 1-d wave equation with potential:
//! finite-difference calculus on a uniform mesh, an explicit leapfrog solver
//! with boundary-flux observation, Carleman-weighted conjugate operators and
//! their inequality evaluators, and stability/reconstruction routines for the
//! potential inverse problem.
//!
//! The crate is `no_std` + `alloc`; IO, configuration and CSV live in the
//! companion `waveinv` crate.

#![cfg_attr(not(test), no_std)]
// stencil code indexes neighbours explicitly, and the `!(x > 0)` guards
// reject NaN parameters on purpose
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod carleman;
pub mod error;
pub(crate) mod fmath;
pub mod grid;
pub mod identities;
pub mod inverse;
pub mod quad;
pub mod rng;
pub mod spacetime;
pub mod stencil;
pub mod time;
pub mod wave;

pub use error::{Error, Result};
pub use grid::{Domain, FaceFn, Grid1D, LpNorm, NodeFn};
pub use spacetime::SpaceTimeFn;
pub use time::TimeAxis;
