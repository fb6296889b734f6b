//! Spectrum of the radial operator
//!
//! ```text
//! L = -d²/dξ² - (1/ξ) d/dξ + γ²/ξ² - a/ξ + bξ + ξ²
//! ```
//!
//! computed three ways: polynomial solutions from the truncated Frobenius
//! series ([`frobenius`]), a Rayleigh-Ritz solve in a Gaussian basis
//! ([`variational`]) and a finite-difference Sturm-Liouville solver
//! ([`oracle`]). The truncated series only produces isolated points
//! `(a^(n,i)(b), W^(n))` that lie on the eigencurves `W_ν(a, b)`; the other
//! two solvers produce the whole spectrum for any `(a, b)`.

// argument checks are written `!(x > 0.0)` so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod error;
pub mod frobenius;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod output;
pub mod poly;
pub mod real;
pub mod sweep;
pub mod tridiag;
pub mod variational;
pub mod verify;

pub use error::{Error, Result};
pub use model::{PhysicalParams, ReducedParams, SpinLabel};
