//! Versioned JSON cache for a basis and its quadrature grid.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::{build_basis, HarmonicBasis};
use super::quadrature::{hopf_grid, GridLevels, QuadratureGrid};
use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Bumped whenever the basis construction or node ordering changes.
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisCache {
    pub version: u32,
    pub max_degree: usize,
    /// Per degree, rows of monomial coefficients.
    pub blocks: Vec<Vec<Vec<f64>>>,
    pub grid_levels: GridLevels,
    pub weights: Vec<f64>,
}

impl BasisCache {
    pub fn new(basis: &HarmonicBasis, grid: &QuadratureGrid) -> Self {
        let blocks = basis
            .blocks()
            .iter()
            .map(|b| b.coeffs().row_iter().map(|r| r.iter().copied().collect()).collect())
            .collect();
        Self {
            version: CACHE_VERSION,
            max_degree: basis.max_degree(),
            blocks,
            grid_levels: grid.levels(),
            weights: grid.weights().to_vec(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, serde_json::to_string(self)?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Rebuilds basis and grid, rejecting a cache written for other parameters.
    pub fn restore(&self, max_degree: usize, levels: GridLevels) -> Result<(HarmonicBasis, QuadratureGrid)> {
        if self.version != CACHE_VERSION {
            return Err(Error::CacheMismatch(format!("version {} != {}", self.version, CACHE_VERSION)));
        }
        if self.max_degree != max_degree || self.grid_levels != levels {
            return Err(Error::CacheMismatch(format!(
                "cache holds degree {} on {:?}, requested degree {} on {:?}",
                self.max_degree, self.grid_levels, max_degree, levels
            )));
        }
        let tables = self
            .blocks
            .iter()
            .map(|rows| {
                let ncols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != ncols) {
                    return Err(Error::CacheMismatch("ragged coefficient table".into()));
                }
                Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = HarmonicBasis::from_coefficient_tables(tables)?;
        let grid = hopf_grid(levels)?;
        if grid.weights() != self.weights.as_slice() {
            return Err(Error::CacheMismatch("grid weights differ".into()));
        }
        Ok((basis, grid))
    }
}

/// Loads from `path` when it matches the request, otherwise builds and writes it.
pub fn load_or_build(path: &Path, max_degree: usize, levels: GridLevels) -> Result<(HarmonicBasis, QuadratureGrid)> {
    if let Ok(cache) = BasisCache::load(path) {
        if let Ok(restored) = cache.restore(max_degree, levels) {
            return Ok(restored);
        }
    }
    let basis = build_basis(max_degree)?;
    let grid = hopf_grid(levels)?;
    BasisCache::new(&basis, &grid).save(path)?;
    Ok((basis, grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("basis.json");
        let levels = GridLevels::new(3, 6, 6);
        let (b, _) = load_or_build(&path, 3, levels).unwrap();
        let cache = BasisCache::load(&path).unwrap();
        let (b2, g2) = cache.restore(3, levels).unwrap();
        assert_eq!(b.block(3).coeffs(), b2.block(3).coeffs());
        assert_eq!(g2.levels(), levels);
        assert!(matches!(cache.restore(4, levels), Err(Error::CacheMismatch(_))));
        let mut stale = cache.clone();
        stale.version = 0;
        assert!(matches!(stale.restore(3, levels), Err(Error::CacheMismatch(_))));
    }
}
