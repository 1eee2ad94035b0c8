//! Numerical tolerances shared by every module.
//!
//! Relative tolerances are measured against the max-norm of the larger operand.

/// Allowed relative deviation of `M` from `M*` before a Hermitian constructor rejects it.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// `λ_min > SPD_TOL · λ_max` is required for positive definiteness.
pub const SPD_TOL: f64 = 1e-12;

/// Allowed `‖U*U − I‖_max`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Relative reconstruction tolerance for eigendecompositions.
pub const RECON_TOL: f64 = 1e-11;

/// Relative slack for Löwner-order comparisons.
pub const ORDER_TOL: f64 = 1e-12;

/// Relative tolerance for the mean identity laws.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Cyclic Jacobi sweep cap.
pub const MAX_SWEEPS: usize = 64;

/// Relative scale below which an imaginary part of a computed eigenvalue is treated as roundoff.
pub const IMAG_TRUNCATE_TOL: f64 = 1e-12;

/// Default residual target of the orbit-sum solver.
pub const ORBIT_TOL: f64 = 1e-8;

/// Eigenvalue preservation tolerance for orbit membership.
pub const ORBIT_EIG_TOL: f64 = 1e-10;

/// Majorization tolerance for vectors `x`, `y`: `1e-9 · (1 + max|entries|)`.
pub fn maj_tol(x: &[f64], y: &[f64]) -> f64 {
    let m = x.iter().chain(y).fold(0.0_f64, |acc, v| acc.max(v.abs()));
    1e-9 * (1.0 + m)
}
