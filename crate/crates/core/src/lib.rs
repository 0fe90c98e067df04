//! Gaussian quadrature for C0 and C1 polynomial splines on arbitrary partitions.
//!
//! Rules are built subinterval by subinterval from semi-classical Jacobi polynomials
//! whose weights carry Dirac terms at the subinterval ends. The Dirac coefficients are
//! marched from both boundaries towards one "middle" subinterval, so that every spline
//! supported on two neighbouring subintervals is integrated exactly.

pub mod cli;
pub mod error;
pub mod maps;
pub mod orthopoly;
pub mod props;
pub mod rulegen;
pub mod semiclassical;
pub mod verify;

pub use error::{Error, Result};
