//! Reconstruction of positive, possibly singular, measures from truncated
//! moment data.
//!
//! The pipeline has three stages:
//!
//! 1. [`conditioning`] maps the moments of a measure to the moments of its
//!    bounded phase function (line, circle, polydisk and per-ray variants).
//! 2. [`maxent`] recovers the phase from its moments with the FIME dual
//!    coordinate-ascent solver.
//! 3. [`transform`] inverts the phase pointwise through Hilbert-transform
//!    boundary formulas.
//!
//! [`raybeam`] runs the multivariate ray sweep and evaluates Radon slices,
//! and [`pipeline`] wires everything together for the command-line tool.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod conditioning;
pub mod error;
pub mod formats;
pub mod maxent;
pub mod pipeline;
pub mod raybeam;
pub mod series;
pub mod transform;

pub use error::{Error, Result};
