//! Dense complex linear algebra: validated matrix types, Hermitian
//! eigendecomposition, spectral matrix functions, polar decomposition and general
//! eigenvalues.

pub mod eigen;
pub mod funcs;
pub mod io;
pub mod matrix;
pub mod polar;
pub mod spectrum;

pub use eigen::{eig_hermitian, EigenPair};
pub use funcs::{exp_h, inv_spd, log_spd, mat_fn, pow_spd, sqrt_spd, MatFn, SkewExp};
pub use matrix::{
    c, diag, frobenius, hermitian_part, identity, max_norm, rel_diff, unitarity_defect, CMat,
    ComplexMatrix, HermitianMatrix, SpdMatrix, UnitaryMatrix,
};
pub use polar::{polar, singular_values, PolarSide};
pub use spectrum::{spectrum, spectrum_general, SpectrumVector};

/// Determinant through LU with partial pivoting.
pub fn det(m: &CMat) -> num_complex::Complex64 {
    m.clone().determinant()
}
