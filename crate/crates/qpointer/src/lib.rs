//! Conditioned weak measurement with a deformed-oscillator pointer.
//!
//! The crate models a pointer whose ladder operators obey
//! `a a' - q a' a = 1` for a deformation parameter `0 < q <= 1`.  A system
//! prepared in a coherent state is weakly coupled to one of two pointer
//! quadratures and then post-selected; the conditioned pointer state picks
//! up the (complex) weak value of the coupled quadrature, and its photon
//! statistics and quadrature moments respond to both the coupling and the
//! deformation.
//!
//! Two evaluation paths exist for every reported quantity:
//!
//! * closed forms, assembled from normal-ordered coherent-state matrix
//!   elements ([`qspecial`], [`weakmeas`], [`photonstats`]);
//! * dense matrix mechanics on an adaptively truncated number basis
//!   ([`fockspace`]).
//!
//! The closed forms are what the crate reports; the matrix path rides
//! along as a cross-check, surfaced through `oracle_deltas` fields, log
//! warnings, and the `verify` subcommand of the bundled CLI.
//!
//! ```
//! use num_complex::Complex64;
//! use qpointer::qspecial::{q_exp, DeformationParameter};
//!
//! let q = DeformationParameter::new(0.5)?;
//! let e = q_exp(Complex64::new(1.0, 0.0), q)?;
//! assert!((e.value.re - 3.4627466194550636).abs() < 1e-12);
//! # Ok::<(), qpointer::Error>(())
//! ```

mod brackets;
pub mod cli;
pub mod error;
pub mod fockspace;
pub mod photonstats;
pub mod qspecial;
pub mod weakmeas;

pub use error::{Error, Result};

use num_complex::Complex64;

/// Relative distance `|a - b| / max(|a|, |b|, 1)`, the scale used by every
/// cross-check in the crate. The floor of 1 makes the measure absolute for
/// small quantities and relative for large ones.
pub fn rel_delta(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub(crate) fn rel_delta_c(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

// The guide chapters double as doctests so their snippets cannot rot.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/deformed-calculus.md")]
    mod deformed_calculus {}
    #[doc = include_str!("../../../book/src/matrix-mechanics.md")]
    mod matrix_mechanics {}
    #[doc = include_str!("../../../book/src/weak-measurement.md")]
    mod weak_measurement {}
    #[doc = include_str!("../../../book/src/photon-statistics.md")]
    mod photon_statistics {}
    #[doc = include_str!("../../../book/src/squeezing.md")]
    mod squeezing {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
