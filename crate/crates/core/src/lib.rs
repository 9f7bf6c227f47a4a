//! Exact twisted cohomology of cusped hyperbolic 3-manifold groups, slice coordinates of
//! deformation classes, and generalized-cusp (type 0/1/2) classification.

pub mod cohomology;
pub mod diagnostics;
pub mod fpgroup;
pub mod input;
pub mod lie;
pub mod linalg;
pub mod numfield;
pub mod pairing;
pub mod rep;
pub mod report;
pub mod scalar;
pub mod slice;

pub use linalg::Matrix;
pub use numfield::{FieldElem, NumberField, Rational};
pub use scalar::Scalar;
