//! Matrix functions through the spectral decomposition `f(M) = Q diag(f(λ)) Q*`.

use num_complex::Complex64;

use super::matrix::{CMat, HermitianMatrix, SpdMatrix, UnitaryMatrix};
use crate::error::{Error, Result};

/// Scalar function applied spectrally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatFn {
    Exp,
    Log,
    Pow(f64),
    Sqrt,
}

impl MatFn {
    fn needs_positive(self) -> bool {
        match self {
            MatFn::Exp => false,
            MatFn::Log | MatFn::Sqrt => true,
            MatFn::Pow(t) => t.fract() != 0.0,
        }
    }

    fn eval(self, x: f64) -> f64 {
        match self {
            MatFn::Exp => x.exp(),
            MatFn::Log => x.ln(),
            MatFn::Pow(t) => {
                if t.fract() == 0.0 && t.abs() < i32::MAX as f64 {
                    x.powi(t as i32)
                } else {
                    x.powf(t)
                }
            }
            MatFn::Sqrt => x.sqrt(),
        }
    }
}

/// Apply `f` to a Hermitian matrix.
///
/// Log, sqrt and non-integer powers require a positive definite argument and fail
/// with [`Error::DomainError`] otherwise.
pub fn mat_fn(m: &HermitianMatrix, f: MatFn) -> Result<HermitianMatrix> {
    let e = m.eig()?;
    if f.needs_positive() {
        let min = *e.values.last().expect("non-empty");
        let max = e.values[0];
        if !(min > 0.0 && min > crate::tol::SPD_TOL * max) {
            return Err(Error::DomainError(match f {
                MatFn::Log => "log",
                MatFn::Sqrt => "sqrt",
                _ => "fractional power",
            }));
        }
    }
    if let MatFn::Pow(t) = f {
        if !t.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "exponent",
                value: t,
            });
        }
        if t < 0.0 && e.values.contains(&0.0) {
            return Err(Error::SingularInput);
        }
    }
    Ok(HermitianMatrix::symmetrized(&e.map(|x| f.eval(x))))
}

/// `e^X`, positive definite for every Hermitian `X`.
pub fn exp_h(x: &HermitianMatrix) -> Result<SpdMatrix> {
    Ok(SpdMatrix::new_unchecked(mat_fn(x, MatFn::Exp)?))
}

/// Principal logarithm.
pub fn log_spd(p: &SpdMatrix) -> Result<HermitianMatrix> {
    mat_fn(p.as_hermitian(), MatFn::Log)
}

/// `P^t` for real `t`.
pub fn pow_spd(p: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    Ok(SpdMatrix::new_unchecked(mat_fn(p.as_hermitian(), MatFn::Pow(t))?))
}

pub fn sqrt_spd(p: &SpdMatrix) -> Result<SpdMatrix> {
    Ok(SpdMatrix::new_unchecked(mat_fn(p.as_hermitian(), MatFn::Sqrt)?))
}

pub fn inv_spd(p: &SpdMatrix) -> Result<SpdMatrix> {
    pow_spd(p, -1.0)
}

/// `e^{-ηK}` for skew-Hermitian `K`, via the Hermitian `H = iK` so that `e^{-ηK} = e^{iηH}`.
///
/// Returns a closure-friendly decomposition: reuse [`SkewExp::at`] for many step sizes.
pub struct SkewExp {
    eig: super::eigen::EigenPair,
}

impl SkewExp {
    pub fn new(k: &CMat) -> Result<Self> {
        let h = HermitianMatrix::symmetrized(&k.map(|z| z * Complex64::i()));
        Ok(Self { eig: h.eig()?.clone() })
    }

    /// `e^{-ηK}`.
    pub fn at(&self, eta: f64) -> UnitaryMatrix {
        UnitaryMatrix::new_unchecked(
            self.eig
                .map_complex(|lam| Complex64::from_polar(1.0, eta * lam)),
        )
    }
}
