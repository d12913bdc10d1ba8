//! Idempotents, Peirce spectra and spectral syzygies of finite-dimensional
//! commutative nonassociative algebras over the complex numbers.
//!
//! The crate is `no_std` (it needs `alloc`). An [`Algebra`] is given by its
//! structure constants; [`solve::solve_idempotents`] enumerates every
//! idempotent and 2-nilpotent direction by total-degree homotopy
//! continuation, [`spectral`] turns each idempotent into a Peirce spectrum
//! and decides genericity, and [`syzygy`] evaluates the identities that the
//! characteristic polynomials of the idempotents of a generic algebra obey.
//! [`metrised`] covers the cubic-form correspondence and extremal
//! idempotents, and [`catalog`] builds the standard example algebras.

#![no_std]
// Index loops mirror the tensor formulas; `!(x > t)` rejects NaN on purpose.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod catalog;
mod error;
pub mod linalg;
pub mod metrised;
pub mod poly;
pub mod rng;
pub mod solve;
pub mod spectral;
pub mod syzygy;

pub use algebra::{Algebra, CharPoly, Element};
pub use error::{Error, Result};
pub use num_complex::Complex;
pub use solve::{IdempotentSet, SolveConfig};
pub use spectral::{GenericityKind, GenericityVerdict, IdempotentRecord, Spectrum};

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;

/// Largest dimension accepted by the homotopy solver (4096 paths).
pub const MAX_SOLVER_DIM: usize = 12;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub(crate) fn r(re: f64) -> C64 {
    Complex::new(re, 0.0)
}
