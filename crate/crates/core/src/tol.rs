//! Numerical tolerances, collected in one place.
//!
//! Two regimes matter. Identities that hold algebraically (hermiticity,
//! normalization, projector algebra) are checked at 1e-12; quantities that
//! pass through the eigensolver inherit its rounding and are checked at
//! 1e-10. The remaining fields are physically motivated thresholds for the
//! ancilla workflow.

/// Tolerance bundle consulted by validating constructors and runtime checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Exact algebraic identities: hermiticity, state normalization,
    /// projector orthogonality and completeness.
    pub algebraic: f64,
    /// Quantities produced by the eigensolver: spectra, reconstructions,
    /// eigenvector orthonormality.
    pub spectral: f64,
    /// Eigenvalue spacing below which a ground state counts as degenerate
    /// (also the window that defines the ground manifold).
    pub degeneracy: f64,
    /// Norm drift allowed over a full propagation.
    pub norm_drift: f64,
    /// Weight allowed outside |0> when an ancilla enters a gate sweep.
    pub ancilla_prep: f64,
    /// Weight allowed outside |1> when the ancilla is reset after a full
    /// (theta_f = pi) sweep.
    pub ancilla_reset: f64,
}

/// The default bundle used by every plain constructor.
pub const DEFAULT: Tolerances = Tolerances {
    algebraic: 1e-12,
    spectral: 1e-10,
    degeneracy: 1e-8,
    norm_drift: 1e-9,
    ancilla_prep: 1e-9,
    ancilla_reset: 1e-4,
};

impl Default for Tolerances {
    fn default() -> Self {
        DEFAULT
    }
}
