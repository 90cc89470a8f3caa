//! Weighted seminorms, Schwarzian-type operators, and Beltrami-coefficient
//! diagnostics for analytic functions on the unit disk and the half-planes.
//!
//! The crate is organised around a few moving parts:
//!
//! * [`function`] — a closed-form expression language for analytic
//!   functions, evaluated through truncated Taylor expansions so that
//!   derivatives of any order are exact (no finite differencing).
//! * [`seminorm`] — conformally weighted integral and supremum seminorms
//!   (Besov-type, Bloch, BMOA-type, Hardy-type, decay classes), computed on
//!   dyadic shell ladders with divergence detection.
//! * [`cayley`] — Möbius maps between the disk and the upper/lower
//!   half-planes, with density-weight bookkeeping for transporting both
//!   functions and seminorms.
//! * [`schwarzian`] — Schwarzian and pre-Schwarzian operators, the
//!   logarithmic composition operator and its Möbius-shift fibers, and the
//!   first variation of these operators at the origin of Beltrami space.
//! * [`beltrami`] — Beltrami coefficient fields on the exterior disk or a
//!   half-plane, their size classes, and the induced estimates.
//! * [`suites`] — a gallery of named example functions together with
//!   ready-made diagnostic suites over them.

pub mod beltrami;
pub mod cayley;
mod error;
pub mod function;
pub mod quadrature;
pub mod report;
pub mod schwarzian;
pub mod seminorm;
pub mod suites;
mod taylor;

pub use error::{Error, Result};

/// The scalar type used throughout: double-precision complex numbers.
pub type C = num_complex::Complex64;

/// Convenience constructor for [`C`].
#[inline]
pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}
