//! Local weighted means of Dirichlet-series coefficient streams.
//!
//! Given a pair of coefficient streams `(a_n, λ_n)` / `(b_n, μ_n)` linked by a
//! gamma-factor functional equation, this crate evaluates the smoothly
//! weighted local sum `Σ a_n φ(λ_n/x)` three ways — directly, by residues of
//! the associated Dirichlet series against the weight's Mellin transform, and
//! by the rapidly converging dual oscillatory series — and uses the dual
//! series to locate sign changes of the error term in short intervals.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature
//! (default) adds caching and `std::error::Error` impls.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod feq;
pub mod gamma;
pub mod instances;
pub mod oscillation;
pub mod quad;
pub mod special;
pub mod streams;
pub mod voronoi;
pub mod weight;

mod taylor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
