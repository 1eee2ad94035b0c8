//! Polar (Cartan) decomposition of an invertible matrix.
//!
//! Right: `M = U P` with `P = (M*M)^{1/2}`. Left: `M = P U` with `P = (MM*)^{1/2}`.
//! The unitary factor is formed from the spectral square root and then polished with
//! Newton–Schulz steps `U ← U(3I − U*U)/2`, which converge quadratically near a unitary.

use super::matrix::{identity, unitarity_defect, CMat, ComplexMatrix, HermitianMatrix, SpdMatrix, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::tol::SPD_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolarSide {
    /// `M = P U`
    Left,
    /// `M = U P`
    Right,
}

pub fn polar(m: &ComplexMatrix, side: PolarSide) -> Result<(UnitaryMatrix, SpdMatrix)> {
    polar_raw(m.matrix(), side)
}

pub(crate) fn polar_raw(m: &CMat, side: PolarSide) -> Result<(UnitaryMatrix, SpdMatrix)> {
    let gram = match side {
        PolarSide::Right => m.adjoint() * m,
        PolarSide::Left => m * m.adjoint(),
    };
    let gram = HermitianMatrix::symmetrized(&gram);
    let e = gram.eig()?;
    let smax = e.values[0].max(0.0).sqrt();
    let smin = e.values.last().expect("non-empty").max(0.0).sqrt();
    if !(smin > SPD_TOL * smax) || smax == 0.0 {
        return Err(Error::SingularInput);
    }
    let p = e.map(|x| x.sqrt());
    let p_inv = e.map(|x| 1.0 / x.sqrt());
    let mut u = match side {
        PolarSide::Right => m * p_inv,
        PolarSide::Left => p_inv * m,
    };
    let n = m.nrows();
    for _ in 0..4 {
        if unitarity_defect(&u) <= 4.0 * f64::EPSILON * n as f64 {
            break;
        }
        let corr = identity(n).scale(3.0) - u.adjoint() * &u;
        u = (&u * corr).scale(0.5);
    }
    Ok((
        UnitaryMatrix::new_unchecked(u),
        SpdMatrix::symmetrized(&p),
    ))
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    let gram = HermitianMatrix::symmetrized(&(m.adjoint() * m));
    Ok(gram.eig()?.values.iter().map(|x| x.max(0.0).sqrt()).collect())
}
