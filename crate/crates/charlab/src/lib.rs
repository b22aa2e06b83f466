//! A computational laboratory for sums of quadratic characters weighted by
//! multiplicative functions: combinatorial sieve coefficients with
//! neutraliser weights, bilinear character sums and their bound comparisons,
//! Euler-product constants, truncated Dirichlet series, and exact evaluators
//! for four-fold sums over hyperbolic regions together with their conductor
//! averages.
//!
//! The crate is organized as:
//!
//! * [`arith`] — factor tables, segmented τ sieves, Jacobi symbols, and the
//!   real characters modulo 8;
//! * [`multfunc`] — bounded multiplicative function specifications and their
//!   sieve transforms;
//! * [`sieve`] — upper-bound sieve coefficients and neutraliser checks;
//! * [`constants`] — the local factors f_p, the normalising constant f₀,
//!   singular series, and Dirichlet-series factorizations;
//! * [`charsums`] — the sum evaluators themselves, each with a brute-force
//!   oracle twin where a fast path exists;
//! * [`harness`] — main-term ratio grids, bound fitting, and decay probes;
//! * [`scalar`] — generic compensated accumulation over floats and exact
//!   rationals.
//!
//! All evaluators are deterministic: fixed chunk boundaries, compensated
//! summation, and seeded sequences make reruns byte-identical.

pub mod arith;
pub mod charsums;
pub mod constants;
pub mod error;
pub mod harness;
pub mod multfunc;
pub mod scalar;
pub mod sieve;

pub use error::{Error, Result};

/// The floating-point scalar used by the fast evaluators.
pub type Real = f64;
/// The exact scalar accepted by the generic evaluators.
pub type Exact = num_rational::BigRational;
