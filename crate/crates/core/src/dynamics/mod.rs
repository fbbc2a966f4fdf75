//! Vector fields, integration and numerical verification.

pub mod field;
pub mod integrate;
pub mod oscillation;
pub mod verify;

pub use field::{vector_field, VectorField};
pub use integrate::{integrate, integrate_with, Integrator, SimConfig, Stepper, Trajectory};
pub use oscillation::{detect_oscillation, detect_oscillation_series, OscillationCriteria, OscillationReport};
pub use verify::{compare_quotient_flow, verify_invariance, InvarianceReport, InvarianceVerdict};
