//! Unit vector fields on the 3-sphere.
//!
//! S³ is handled as the group of unit quaternions. Scalar functions are
//! expanded in an orthonormal basis of harmonic polynomials, which makes the
//! left-invariant frame derivatives exact block matrices. On top of that the
//! crate provides Jacobi-type operators and their spectra, frame calculus for
//! vector fields, energy functionals with their identities, and a descent
//! flow for the vertical energy of unit fields.

pub mod eigen;
pub mod error;
pub mod field;
pub mod harmonics;
pub mod io;
pub mod operators;
pub mod su2;
pub mod variational;

pub use error::{Error, Result};
pub use harmonics::{build_basis, hopf_grid, GridLevels, HarmonicBasis, QuadratureGrid};
pub use su2::{AlgebraVector, Quaternion, TangentVector, UnitQuaternion};
pub use field::{FieldSpace, FramedField, Normalization, VariationField};
