//! Angular maximal functions of the Poisson, Stieltjes and Laplace transforms.
//!
//! Inputs are simple functions on the half-line (plus a closed-form
//! exponential family). The crate evaluates the transforms exactly, searches
//! the supremum over the angle for each radius, splits the Poisson kernel
//! into its near and far parts, and runs seeded experiments that measure the
//! constants in the corresponding norm inequalities.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod format;
pub mod func_model;
pub mod kernel_split;
pub mod maximal;
pub mod quadrature;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use func_model::{
    combine, conjugate_exponent, dilate, lp_norm, make_simple, ExpFunction, InputFunction,
    PolarPoint, RadialGrid, Sector, SimpleFunction,
};
pub use transforms::TransformKind;

/// Version string embedded in every emitted artifact.
pub const VERSION: &str = concat!("angmax ", env!("CARGO_PKG_VERSION"));
