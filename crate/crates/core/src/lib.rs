//! Quantum distinguishability measures, their matrix gradients, and
//! data-processing saturation certificates.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: validated Hermitian, positive and PSD operator types with clustered
//!   spectral decompositions.
//! - [`calculus`]: Fréchet derivatives of matrix functions, Hilbert–Schmidt
//!   dualization and finite-difference oracles.
//! - [`channels`]: CPTP maps in Kraus form.
//! - [`divergences`]: relative entropy, fidelity, sandwiched and α-z Rényi
//!   divergences, f-divergences and their gradients.
//! - [`saturation`]: vanishing-gradient residuals, boundary residuals and Petz recovery.
//! - [`fixtures`]: seeded saturating and non-saturating channel/state triples.

// `!(x > tol)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod channels;
pub mod divergences;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod linalg;
pub mod random;
pub mod saturation;

pub use error::{Error, Result};
