//! Geometric-algebra and extensor-calculus engine for metric geometry on an
//! open subset of `ℝⁿ`: multivectors, extensors, differentiable fields,
//! covariant derivative pairs, curvature, and gauge deformations.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod deformation;
pub mod error;
pub mod extensor;
pub mod fields;
pub mod geometry;
pub mod jet;
pub mod scalar;

pub use algebra::{Multivector, Signature};
pub use error::{Error, Result};
pub use extensor::{Extensor11, Extensor12, MetricExtensor};
pub use jet::Jet;
pub use scalar::Scalar;
