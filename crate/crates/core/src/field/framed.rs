//! Vector fields on S³ stored as frame components in the harmonic basis.

use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::space::FieldSpace;
use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Accepted `max |1 − |F|²|` for a field to count as unit.
pub const UNIT_FIELD_TOL: f64 = 1e-6;

/// How the stored coefficient triple `G` turns into the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `F = G`.
    Linear,
    /// `F = G/|G|`, unit by construction wherever `G ≠ 0`.
    Nodal,
}

/// Where a field came from, kept for replay.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub parameters: Vec<f64>,
}

impl Provenance {
    pub fn new(generator: &str, seed: Option<u64>, parameters: Vec<f64>) -> Self {
        Self { generator: generator.to_string(), seed, parameters }
    }
}

/// `F = f₁σ₁ + f₂σ₂ + f₃σ₃`, each `fₖ` a coefficient vector on the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedField {
    coeffs: [DVector<f64>; 3],
    normalization: Normalization,
    pub provenance: Provenance,
}

impl FramedField {
    pub fn new(coeffs: [DVector<f64>; 3], normalization: Normalization) -> Self {
        Self { coeffs, normalization, provenance: Provenance::default() }
    }

    pub fn linear(coeffs: [DVector<f64>; 3]) -> Self {
        Self::new(coeffs, Normalization::Linear)
    }

    /// The unit field `G/|G|`.
    pub fn normalized(g: [DVector<f64>; 3]) -> Self {
        Self::new(g, Normalization::Nodal)
    }

    pub fn zero(space: &FieldSpace) -> Self {
        Self::linear([0, 1, 2].map(|_| DVector::zeros(space.dim())))
    }

    /// Constant frame coefficients `u`.
    pub fn constant(space: &FieldSpace, u: [f64; 3]) -> Self {
        Self::linear(u.map(|c| space.constant(c)))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn coeffs(&self) -> &[DVector<f64>; 3] {
        &self.coeffs
    }

    pub fn component(&self, k: usize) -> &DVector<f64> {
        &self.coeffs[k]
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn check_space(&self, space: &FieldSpace) -> Result<()> {
        for c in &self.coeffs {
            space.check_coeffs(c)?;
        }
        Ok(())
    }

    /// Frame components at the grid nodes.
    pub fn nodal_values(&self, space: &FieldSpace) -> [DVector<f64>; 3] {
        let g = self.coeffs.each_ref().map(|c| space.nodes().evaluate(c));
        match self.normalization {
            Normalization::Linear => g,
            Normalization::Nodal => {
                let norm = DVector::from_fn(g[0].len(), |i, _| (g[0][i].powi(2) + g[1][i].powi(2) + g[2][i].powi(2)).sqrt());
                g.map(|v| v.component_div(&norm))
            }
        }
    }

    /// `max |1 − |F|²|` over the grid.
    pub fn unit_deviation(&self, space: &FieldSpace) -> f64 {
        let v = self.nodal_values(space);
        (0..v[0].len()).map(|i| (1.0 - (v[0][i].powi(2) + v[1][i].powi(2) + v[2][i].powi(2))).abs()).fold(0.0, f64::max)
    }

    pub fn is_unit(&self, space: &FieldSpace) -> bool {
        self.unit_deviation(space) < UNIT_FIELD_TOL
    }

    pub fn require_unit(&self, space: &FieldSpace) -> Result<()> {
        self.check_space(space)?;
        let deviation = self.unit_deviation(space);
        if deviation < UNIT_FIELD_TOL {
            Ok(())
        } else {
            Err(Error::FieldNotUnit { deviation })
        }
    }

    /// Coefficient representation of the field itself: the stored triple for
    /// linear fields, the quadrature projection of `G/|G|` otherwise.
    pub fn to_linear(&self, space: &FieldSpace) -> FramedField {
        match self.normalization {
            Normalization::Linear => self.clone(),
            Normalization::Nodal => {
                let v = self.nodal_values(space);
                FramedField::linear(v.each_ref().map(|c| space.project(c))).with_provenance(self.provenance.clone())
            }
        }
    }

    pub fn add(&self, other: &FramedField) -> Result<FramedField> {
        if self.normalization != Normalization::Linear || other.normalization != Normalization::Linear {
            return Err(Error::Degenerate("sums are defined for linear fields only"));
        }
        Ok(FramedField::linear([0, 1, 2].map(|k| &self.coeffs[k] + &other.coeffs[k])))
    }

    pub fn scale(&self, s: f64) -> FramedField {
        match self.normalization {
            Normalization::Linear => FramedField::linear(self.coeffs.each_ref().map(|c| c * s)),
            Normalization::Nodal => self.clone(),
        }
    }

    pub fn to_record(&self, space: &FieldSpace) -> FieldRecord {
        FieldRecord {
            basis_degree: space.max_degree(),
            normalization: self.normalization,
            coefficients: self.coeffs.each_ref().map(|c| c.iter().copied().collect()),
            unit: self.is_unit(space),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_record(record: &FieldRecord, space: &FieldSpace) -> Result<Self> {
        if record.basis_degree != space.max_degree() {
            return Err(Error::DegreeMismatch { field: record.basis_degree, space: space.max_degree() });
        }
        let coeffs = record.coefficients.each_ref().map(|c| DVector::from_vec(c.clone()));
        let f = FramedField::new(coeffs, record.normalization).with_provenance(record.provenance.clone());
        f.check_space(space)?;
        Ok(f)
    }
}

/// JSON form of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub basis_degree: usize,
    pub normalization: Normalization,
    pub coefficients: [Vec<f64>; 3],
    pub unit: bool,
    pub provenance: Provenance,
}

impl FieldRecord {
    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, serde_json::to_string_pretty(self)?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// A field `f₂σ₂ + f₃σ₃` orthogonal to `σ₁`, stored as `f = f₂ + i f₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationField {
    coeffs: DVector<Complex64>,
    pub provenance: Provenance,
}

impl VariationField {
    pub fn new(coeffs: DVector<Complex64>) -> Self {
        Self { coeffs, provenance: Provenance::default() }
    }

    pub fn from_parts(f2: &DVector<f64>, f3: &DVector<f64>) -> Self {
        Self::new(DVector::from_fn(f2.len(), |i, _| Complex64::new(f2[i], f3[i])))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn real_part(&self) -> DVector<f64> {
        self.coeffs.map(|z| z.re)
    }

    pub fn imag_part(&self) -> DVector<f64> {
        self.coeffs.map(|z| z.im)
    }

    pub fn to_framed(&self) -> FramedField {
        FramedField::linear([DVector::zeros(self.coeffs.len()), self.real_part(), self.imag_part()])
            .with_provenance(self.provenance.clone())
    }

    /// `∫|α|²`, exact by orthonormality.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Real `L²` inner product `∫⟨α, β⟩`.
    pub fn inner(&self, other: &VariationField) -> f64 {
        self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| (a * b.conj()).re).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::GridLevels;

    #[test]
    fn constant_field_is_unit_and_round_trips() {
        let s = FieldSpace::new(2, GridLevels::new(3, 8, 8)).unwrap();
        let f = FramedField::constant(&s, [0.0, 0.6, 0.8]).with_provenance(Provenance::new("test", Some(3), vec![1.0]));
        assert!(f.unit_deviation(&s) < 1e-14);
        let r = f.to_record(&s);
        assert!(r.unit);
        let json = serde_json::to_string(&r).unwrap();
        let back: FieldRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(FramedField::from_record(&back, &s).unwrap(), f);
    }

    #[test]
    fn nodal_normalization_is_unit() {
        let s = FieldSpace::new(2, GridLevels::new(3, 8, 8)).unwrap();
        let g = FramedField::constant(&s, [1.0, 0.5, 0.0]).coeffs().clone();
        let mut g = g;
        g[2] = s.basis().project_polynomial(&crate::harmonics::Polynomial::coordinate(1)) * 0.3;
        let f = FramedField::normalized(g.clone());
        assert!(f.unit_deviation(&s) < 1e-15);
        assert!(FramedField::linear(g).unit_deviation(&s) > 0.1);
    }
}
