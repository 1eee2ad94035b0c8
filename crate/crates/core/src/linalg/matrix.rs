//! Validated matrix types.
//!
//! Every type wraps a dense `DMatrix<Complex64>` and guarantees its invariant at
//! construction. Hermitian constructors symmetrize to `(M + M*)/2`, so the stored
//! matrix is exactly Hermitian even when the input carried roundoff.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eigen::{eig_hermitian_raw, EigenPair};
use crate::error::{Error, Result};
use crate::tol::{HERMITIAN_TOL, SPD_TOL, UNITARY_TOL};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest entry modulus.
pub fn max_norm(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `(M + M*)/2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Max-norm of `a − b` relative to the larger of the two max-norms.
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    let scale = max_norm(a).max(max_norm(b));
    let d = max_norm(&(a - b));
    if scale == 0.0 {
        d
    } else {
        d / scale
    }
}

/// Real diagonal matrix as a complex matrix.
pub fn diag(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = CMat::zeros(n, n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = c(*v, 0.0);
    }
    m
}

/// Build from real row-major rows.
pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMat::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
}

fn check_square_finite(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::Empty);
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

pub(crate) fn require_same_dim(a: &CMat, b: &CMat) -> Result<()> {
    check_dims(a.nrows(), b.nrows())
}

/// A general square matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(CMat);

impl ComplexMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        check_square_finite(&m)?;
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }
}

impl From<HermitianMatrix> for ComplexMatrix {
    fn from(h: HermitianMatrix) -> Self {
        Self(h.m)
    }
}

impl From<SpdMatrix> for ComplexMatrix {
    fn from(p: SpdMatrix) -> Self {
        Self(p.0.m)
    }
}

impl From<UnitaryMatrix> for ComplexMatrix {
    fn from(u: UnitaryMatrix) -> Self {
        Self(u.0)
    }
}

/// A Hermitian matrix. Its eigendecomposition is computed once, on first use.
#[derive(Clone)]
pub struct HermitianMatrix {
    m: CMat,
    eig: OnceLock<EigenPair>,
}

impl HermitianMatrix {
    /// Validates Hermitian-ness up to [`HERMITIAN_TOL`] and symmetrizes.
    pub fn new(m: CMat) -> Result<Self> {
        check_square_finite(&m)?;
        let scale = max_norm(&m);
        let dev = max_norm(&(&m - m.adjoint()));
        let rel = if scale == 0.0 { 0.0 } else { dev / scale };
        if rel > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: rel });
        }
        Ok(Self::symmetrized(&m))
    }

    /// Hermitian part of `m` without a tolerance check. For matrices that are
    /// Hermitian in exact arithmetic.
    pub(crate) fn symmetrized(m: &CMat) -> Self {
        Self {
            m: hermitian_part(m),
            eig: OnceLock::new(),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(from_real_rows(rows))
    }

    pub fn zeros(n: usize) -> Self {
        Self::symmetrized(&CMat::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_inner(self) -> CMat {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    /// Cached eigendecomposition, values descending.
    pub fn eig(&self) -> Result<&EigenPair> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let e = eig_hermitian_raw(&self.m)?;
        Ok(self.eig.get_or_init(|| e))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.values.clone())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::symmetrized(&self.m.scale(s))
    }
}

impl PartialEq for HermitianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("HermitianMatrix").field(&self.m).finish()
    }
}

/// A Hermitian positive definite matrix: `λ_min > SPD_TOL · λ_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix(HermitianMatrix);

impl SpdMatrix {
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let e = h.eig()?;
        let max = e.values[0];
        let min = *e.values.last().expect("non-empty");
        if !(min > 0.0 && min > SPD_TOL * max) {
            return Err(Error::NotPositiveDefinite { min, max });
        }
        Ok(Self(h))
    }

    pub fn from_matrix(m: CMat) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_matrix(from_real_rows(rows))
    }

    pub fn identity(n: usize) -> Self {
        Self(HermitianMatrix::symmetrized(&identity(n)))
    }

    /// Caller guarantees positive definiteness in exact arithmetic.
    pub(crate) fn new_unchecked(h: HermitianMatrix) -> Self {
        Self(h)
    }

    pub(crate) fn symmetrized(m: &CMat) -> Self {
        Self(HermitianMatrix::symmetrized(m))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMat {
        self.0.matrix()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }

    pub fn eig(&self) -> Result<&EigenPair> {
        self.0.eig()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.0.eigenvalues()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Product of eigenvalues.
    pub fn det(&self) -> Result<f64> {
        Ok(self.eig()?.values.iter().product())
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "scale",
                value: s,
            });
        }
        Ok(Self(self.0.scale(s)))
    }
}

/// A unitary matrix: `‖U*U − I‖_max ≤ UNITARY_TOL`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMat);

impl UnitaryMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        check_square_finite(&m)?;
        let deviation = unitarity_defect(&m);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(identity(n))
    }

    pub(crate) fn new_unchecked(m: CMat) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }

    /// `U M U*`.
    pub fn conjugate(&self, m: &CMat) -> CMat {
        &self.0 * m * self.0.adjoint()
    }
}

/// `‖U*U − I‖_max`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    max_norm(&(u.adjoint() * u - identity(n)))
}
