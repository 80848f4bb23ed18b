//! Variational geometry of powered distance functions to closed sets.
//!
//! The crate is organised bottom-up:
//!
//! * [`setlib`]: a catalog of closed (possibly nonconvex) sets with exact
//!   distance and projection oracles.
//! * [`funclib`]: powered distance functions `(mu/p) d^p`, their limiting and
//!   Clarke subdifferentials, and smooth reference functions.
//! * [`certify`]: sampling-based estimation of Polyak-Lojasiewicz,
//!   p-Lojasiewicz, conditioning, submetric-regularity and sandwich constants.
//! * [`proxflow`]: the proximal point sequence and its finite-length
//!   certificate.

pub mod certify;
mod error;
pub mod funclib;
pub mod proxflow;
pub mod setlib;

pub use error::{Error, Result};
