//! Vector fields on S³ in the left-invariant frame: representation, frame
//! calculus, shear, pointwise inequalities and test fields.

pub mod calculus;
pub mod framed;
pub mod generators;
pub mod inequality;
pub mod jets;
pub mod shear;
pub mod space;

pub use calculus::{
    apply_vertical_jacobi, covariant_derivative, divergence, energy_density, lambda_apply, lie_derivative_metric,
    rough_laplacian, rough_laplacian_nodal, FrameTensor,
};
pub use framed::{FieldRecord, FramedField, Normalization, Provenance, VariationField, UNIT_FIELD_TOL};
pub use generators::{
    conformal_gradient_horizontal, conformal_lift, hopf_left, hopf_right, perturbed_hopf, random_unit, random_variation,
};
pub use inequality::{inequality_gap, GapKind, GapReport, GapTerms};
pub use jets::{field_jets, grid_jets, Jet};
pub use shear::{shear_parameters, ShearReport};
pub use space::{FieldSpace, NodeSet};
