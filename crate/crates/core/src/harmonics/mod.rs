//! Harmonic polynomials on S³: monomial algebra, exact integration,
//! Hopf-coordinate quadrature and the orthonormal degree-block basis.

pub mod basis;
pub mod cache;
pub mod integral;
pub mod polynomial;
pub mod quadrature;

pub use basis::{build_basis, DegreeBlock, HarmonicBasis, MAX_SUPPORTED_DEGREE};
pub use cache::{load_or_build, BasisCache, CACHE_VERSION};
pub use integral::{monomial_integral, sphere_volume};
pub use polynomial::{Exponent, MonomialTable, Polynomial};
pub use quadrature::{gauss_legendre, hopf_grid, GridLevels, QuadratureGrid};
