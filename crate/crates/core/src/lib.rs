//! Gaussian comparison bounds for the minimum eigenvalue of random psd sums.
//!
//! The crate turns comparison theorems for `λ_min` of sums of random psd
//! matrices into calculators and a Monte Carlo verification harness:
//!
//! - [`matcore`]: dense self-adjoint matrices over the real or complex field.
//! - [`gaussmodel`]: structured Gaussian matrix models, sampling, σ² and σ*².
//! - [`compare`]: bound engines producing [`compare::BoundReport`]s.
//! - [`apps`]: Wishart, design subsampling, covariance estimation and sparse sketching.
//! - [`mcsim`]: Monte Carlo and exact-enumeration checks of every inequality.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the Monte Carlo
//! harness runs in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod compare;
pub mod error;
pub mod gaussmodel;
pub mod matcore;
pub mod mcsim;
pub mod report;
pub mod rng;
mod scalar;

pub use error::{Error, Result};
pub use matcore::{Field, RectMatrix, SymMatrix};
pub use scalar::Scalar;

pub type SymMatrixF64 = SymMatrix<f64>;
pub type SymMatrixF32 = SymMatrix<f32>;
pub type RectMatrixF64 = RectMatrix<f64>;
pub type RectMatrixF32 = RectMatrix<f32>;
pub type GaussianModelF64 = gaussmodel::GaussianModel<f64>;
pub type GaussianModelF32 = gaussmodel::GaussianModel<f32>;
pub type BoundReportF64 = compare::BoundReport<f64>;
