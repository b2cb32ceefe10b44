//! Exact computations around tautological bundles on Hilbert schemes of points
//! of smooth surfaces.
//!
//! Everything here is pure and allocation-only: graded dimension bookkeeping,
//! characters of symmetric groups, equivariant Cech models, invariant counts via
//! orbit reduction, multi-Tor representations, the spectral sequence bookkeeping
//! for exterior powers, and the closed cohomology formulas built on top of them.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cechcomplex;
pub mod cohomology;
pub mod danila;
mod error;
pub mod exterior;
pub mod grading;
pub mod linalg;
pub mod multitor;
pub mod perm;
pub mod ringmodel;
pub mod specseq;
pub mod symrep;

pub use error::{Error, Result};
pub use grading::GradedDim;
pub use linalg::Q;
