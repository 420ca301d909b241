//! Uniform polynomial approximation on convex bodies.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below fix the common double-precision case.

pub mod approx;
pub mod convexify;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod polynomials;
pub mod scalar;
pub mod smoothness;
pub mod whitney;

pub use approx::ApproxSolution;
pub use error::{Error, Result};
pub use geometry::{AffineMap, ConvexBody, GridSpec, Resolution, Shape};
pub use linalg::Matrix;
pub use polynomials::Polynomial;
pub use scalar::Scalar;
pub use smoothness::{ModulusWitness, ScalarField};

pub type ConvexBody64 = ConvexBody<f64>;
pub type Polynomial64 = Polynomial<f64>;
pub type AffineMap64 = AffineMap<f64>;
pub type Matrix64 = Matrix<f64>;
pub type ScalarField64 = ScalarField<f64>;
