//! Numerical conformal geometry of surfaces in `S^{n+2}` in the light-cone model.
//!
//! The crate samples conformal immersions on rectangular charts, builds their
//! conformal Gauss frames and Maurer–Cartan blocks with finite differences, and
//! checks the Willmore and harmonic-map characterizations against them. On the
//! other side it normalizes strongly conformally harmonic data with the
//! `SL(2,C)` model of `SO⁺(1,3)` and reconstructs the Willmore surface (or the
//! minimal surface in `R^{n+2}`) encoded by a harmonic map.
//!
//! Module map:
//!
//! * [`lorentz`]: Minkowski algebra, `SO⁺(1,n+3)` membership, Cartan split.
//! * [`chart`]: grids in `z = u + iv`, Wirtinger derivatives, quadrature.
//! * [`surface`]: canonical lift, `N`, normal frame and the invariants `κ, s, b, β`.
//! * [`gauss_frame`]: conformal Gauss frame, Maurer–Cartan blocks, Willmore energy.
//! * [`harmonic`]: the `λ`-family, flatness, harmonic block equations, gauges.
//! * [`spinor`]: `Mat(2,C)` model, double cover, null-column normalization.
//! * [`reconstruct`]: classification and recovery of Willmore/minimal surfaces.
//! * [`zoo`]: closed-form example surfaces, synthetic frames, file I/O.
//! * [`cli`]: run configuration and the three report-producing commands.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chart;
pub mod cli;
pub mod error;
pub mod gauss_frame;
pub mod harmonic;
pub mod lorentz;
pub mod reconstruct;
pub mod spinor;
pub mod surface;
pub mod zoo;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// `i`, used all over the Wirtinger calculus.
pub const I: C64 = C64::new(0.0, 1.0);
