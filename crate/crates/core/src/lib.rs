//! Numerical differential geometry of distributions on Riemannian charts.
//!
//! The crate evaluates, at sample points of a coordinate chart, the
//! horizontal and vertical tension fields of a distribution `σ ⊂ TM`,
//! and the transformation laws these fields obey under a conformal change
//! of metric `g̃ = e^{2μ} g`. Everything is computed through second-order
//! forward-mode jets ([`jet::Jet2`]) so the first and second derivatives
//! of every composed field are exact up to floating-point round-off.
//!
//! Layout, bottom-up:
//!
//! - [`jet`]: the derivative tower.
//! - [`expr`]: a small expression language for metric entries, vector
//!   field components and conformal factors.
//! - [`geometry`]: metric, Levi-Civita connection, curvature, adapted
//!   frames and scalar-field calculus at a point.
//! - [`tension`]: second fundamental forms, mean curvatures and the
//!   tension fields `τ^h`, `τ^v`.
//! - [`conformal`]: predicted quantities under `g̃ = e^{2μ} g`.
//! - [`scene`]: built-in scenes and deterministic sampling.
//! - [`radial`]: the radial ODE for conformal factors on the punctured
//!   plane with the spherical metric.
//! - [`check`]: the identity registry driven by the CLI.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod check;
pub mod conformal;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
mod linalg;
pub mod radial;
pub mod rng;
pub mod scene;
pub mod tension;

pub use error::{Error, Result};
pub use jet::{Jet1, Jet2, Scalar, MAX_DIM};
