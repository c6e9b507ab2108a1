//! Pseudovolume and mixed pseudovolume of convex bodies in `C^n`.
//!
//! Polytopes are handled combinatorially through their face lattices, dual
//! cones and outer angles; smooth bodies given by support functions are
//! handled by Monte Carlo quadrature of complex Monge-Ampere densities.

pub mod complex_linalg;
pub mod cone;
pub mod error;
mod hull;
pub mod io;
pub mod polytope;
pub mod pseudovolume;
pub mod smooth;
pub mod verify;
pub mod numerics;
pub mod volumes;

pub use error::{Error, Result};
pub use numerics::{RandomStream, Tolerance};
