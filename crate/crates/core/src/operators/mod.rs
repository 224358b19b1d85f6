//! Frame derivatives as exact degree-block matrices, the Jacobi-type
//! operators built from them, and their spectra.

pub mod assemble;
pub mod spectrum;

pub use assemble::{
    assemble_derivative, frame_generator, lambda4_matrix, lambda_matrix, rough_laplacian_field_operator, BlockEntries,
    DegreeBlockOperator, FrameDerivatives, OperatorKind,
};
pub use spectrum::{
    closed_form_spectrum, hopf_map_jacobi_spectrum, identity_jacobi_spectrum, numeric_spectrum, vertical_jacobi_spectrum,
    Family, SpectrumEntry, SpectrumKind, SpectrumLabel, SpectrumReport, SpectrumRow,
};
