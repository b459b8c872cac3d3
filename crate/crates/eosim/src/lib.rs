//! Numerical simulator of time-domain electro-optic sampling of Gaussian
//! quantum states.
//!
//! The crate builds band-limited electric-field and Hilbert-quadrature
//! detection modes on a positive-frequency grid, propagates Gaussian states
//! through a chi(2) detection chain (crystal interaction, spectral filter
//! ports, waveplates, balanced detection), and evaluates coupling-intensity /
//! mode-matching metrics, bandwidth sweeps, quadrature variance scans and
//! Husimi-Q reconstruction.
//!
//! Entry points:
//! - [`field`]: grids, spectral modes, Hilbert transforms, overlaps.
//! - [`gaussian`]: Gaussian states over orthonormal mode bases, detection
//!   moments, Husimi-Q evaluation, seeded shot sampling.
//! - [`chain`]: the electro-optic detection chain and its variants.
//! - [`metrics`]: coupling intensity, mode matching, bandwidth sweeps and
//!   constrained bandwidth optimization.
//! - [`config`] / [`report`]: experiment configuration and CSV/SVG/manifest
//!   output used by the `eosim` binary and the examples.

pub mod chain;
pub mod config;
pub mod error;
pub mod experiments;
pub mod field;
pub mod gaussian;
pub mod metrics;
pub mod report;
pub mod units;

pub use error::{EosError, Result};
