//! Numerical toolkit for the weighted isoperimetric inequality
//! `(|Ω|/π)^{(p+1)/2} ≤ (1/2π) ∫_{∂Ω} |x|^p dσ` in the plane.
//!
//! The crate evaluates both sides on disks, Fourier star domains,
//! polygons and disjoint unions, replays the conformal-mapping argument
//! behind the inequality (Riemann map of the inverted complement, the
//! area series and the Cauchy mean-value bound), checks the equivalent
//! weighted Hardy-Sobolev inequality on gauge test functions, evaluates
//! Green's function level identities and the weighted Flucher bound, and
//! runs perturbation and counterexample scans.
//!
//! Batch work goes through [`exec::Execution`]; with the default
//! `parallel` feature it runs on the rayon pool.

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod error;
pub mod exec;
pub mod fourier;
pub mod geometry;
pub mod greens;
pub mod hardy_sobolev;
pub mod measures;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod search;
pub mod series;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{Domain, OriginLocation, Point};
