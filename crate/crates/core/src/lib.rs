//! Spectra of quantum systems with energy-dependent potentials.
//!
//! * [`specfun`]: confluent and Gauss hypergeometric series.
//! * [`spectrum`]: self-consistent levels under `f(E) = (1 + lambda E)^q`.
//! * [`xform`]: the point/gauge transformation that turns a known
//!   second-order equation into a Schrödinger problem, plus the oscillator
//!   and Coulomb eigenfunctions it produces.
//! * [`quarkonia`]: charmonium and bottomonium masses, the two-splitting
//!   fit, and the experimental reference table.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod numeric;
pub mod quarkonia;
pub mod specfun;
pub mod spectrum;
pub mod xform;

pub use spectrum::{BaseSpectrum, Branch, SaturationModel, SolvedLevel};
