//! Energies, second variation, gradient flow and Hopf classification.

pub mod classify;
pub mod energy;
pub mod flow;
pub mod hessian;

pub use classify::{classify_hopf, rigidity_diagnostics, HopfClassification, RigidityReport, Side, CLASSIFY_TOL};
pub use energy::{
    energy_identity_report, harmonic_section_residual, isometry_pullback, map_energy, pointwise_identity_residual,
    vertical_energy, EnergyReport, HarmonicResidual, MapKind,
};
pub use flow::{gradient_flow, FlowOutcome, FlowParams, FlowStatus, FlowStep, FlowTrace};
pub use hessian::{bochner_yano, energy_second_difference, hessian, HessianValues};
