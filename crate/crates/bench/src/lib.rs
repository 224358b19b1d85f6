//! Shared fixtures for the benchmarks.

use hopf_core::field::generators::random_unit;
use hopf_core::{FieldSpace, FramedField, GridLevels};

/// Degrees exercised by the size-scaling benchmarks.
pub const DEGREES: [usize; 3] = [4, 6, 8];

/// Smallest grid that integrates products of degree-`n` fields exactly.
pub fn grid_for(degree: usize) -> GridLevels {
    let need = 2 * degree + 2;
    GridLevels::new(need.div_ceil(4), need + 1, need + 1)
}

pub fn space(degree: usize) -> FieldSpace {
    FieldSpace::new(degree, grid_for(degree)).expect("grid is exact enough")
}

/// A fixed rough unit field.
pub fn sample_field(space: &FieldSpace) -> FramedField {
    random_unit(space, 3.min(space.max_degree()), 1).expect("random field")
}
