//! Determinant lines, refined torsion of finite-dimensional complexes with a
//! chirality operator, graded determinants of the odd signature operator, and
//! a closed-form model of refined analytic torsion on the circle.

pub mod circle;
pub mod complexes;
mod dense;
pub mod error;
pub mod gradedlinalg;
pub mod signature;
pub mod torsion;
pub mod workbench;

pub use complexes::{CochainComplex, CohomologyElement, CohomologyFrame};
pub use dense::Mat;
pub use error::{Error, Result};
pub use gradedlinalg::{DetElement, GradedDims, Parity, Scalar};
pub use torsion::ChiralityOp;
