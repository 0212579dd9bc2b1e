//! Polynomial-like restrictions of the rational family `F(z) = z^n + lambda/z^d`.
//!
//! The crate builds the regions on which `F` restricts to a degree-two
//! polynomial-like map, checks the hypotheses needed for baby Mandelbrot
//! sets in the parameter plane numerically, reproduces the failure of the
//! older region construction, and renders parameter- and dynamical-plane
//! pictures.

pub mod certify;
pub mod cli;
pub mod error;
pub mod family;
pub mod numerics;
pub mod regions;
pub mod render;

pub use error::{Error, Result};
