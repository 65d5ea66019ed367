//! Canonical and physical phase operators in the oscillator number basis.

pub mod eigen;
pub mod gmatrix;
pub mod operators;
pub mod variance;

pub use eigen::{eigh, spectrum, Spectrum};
pub use gmatrix::{g_entry, GMatrix};
pub use operators::{
    angle_operator_matrix, canonical_phase_matrix, delta_matrix_element, physical_phase_matrix,
    HermitianMatrix, MatrixKind,
};
pub use variance::{
    phase_variance_diagonal, thermal_levels_for, thermal_phase_variance, PhaseKind,
    ThermalVariance, VarianceReport,
};
