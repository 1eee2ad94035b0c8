//! Seeded random instances.
//!
//! Positive definite samples are `Q diag(e^{u_i}) Q*` with `u_i` uniform in
//! `[−spread, spread]` and `Q` the polar unitary of a Gaussian matrix, so the
//! condition number never exceeds `e^{2·spread}`. Hermitian samples use the same
//! construction without the exponential. ChaCha keeps streams identical across
//! platforms.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::matrix::{c, CMat, HermitianMatrix, SpdMatrix, UnitaryMatrix};
use crate::linalg::polar::{polar_raw, PolarSide};

pub const DEFAULT_SPREAD: f64 = 2.0;

pub type InstanceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entry field of generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Complex,
    Real,
}

fn gaussian(n: usize, field: Field, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = match field {
            Field::Complex => StandardNormal.sample(rng),
            Field::Real => 0.0,
        };
        c(re, im)
    })
}

fn haar_like(n: usize, field: Field, rng: &mut impl Rng) -> CMat {
    loop {
        let g = gaussian(n, field, rng);
        if let Ok((u, _)) = polar_raw(&g, PolarSide::Right) {
            let mut u = u.into_inner();
            if field == Field::Real {
                // polar of a real matrix is real; drop roundoff and land in SO(n)
                u = u.map(|z| c(z.re, 0.0));
                if u.map(|z| z.re).determinant() < 0.0 {
                    for i in 0..n {
                        u[(i, 0)] = -u[(i, 0)];
                    }
                }
            }
            return u;
        }
    }
}

/// Random unitary from the polar factor of a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> UnitaryMatrix {
    UnitaryMatrix::new_unchecked(haar_like(n, Field::Complex, rng))
}

/// Random rotation in SO(n).
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> UnitaryMatrix {
    UnitaryMatrix::new_unchecked(haar_like(n, Field::Real, rng))
}

fn check(n: usize, spread: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "spread",
            value: spread,
        });
    }
    Ok(())
}

fn conjugated_diag(n: usize, spread: f64, field: Field, rng: &mut impl Rng, f: fn(f64) -> f64) -> CMat {
    let q = haar_like(n, field, rng);
    let vals: Vec<f64> = (0..n).map(|_| f(rng.random_range(-spread..=spread))).collect();
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { c(vals[i], 0.0) } else { c(0.0, 0.0) });
    &q * d * q.adjoint()
}

pub fn random_hermitian_with(n: usize, spread: f64, field: Field, rng: &mut impl Rng) -> Result<HermitianMatrix> {
    check(n, spread)?;
    Ok(HermitianMatrix::symmetrized(&conjugated_diag(n, spread, field, rng, |u| u)))
}

pub fn random_spd_with(n: usize, spread: f64, field: Field, rng: &mut impl Rng) -> Result<SpdMatrix> {
    check(n, spread)?;
    Ok(SpdMatrix::symmetrized(&conjugated_diag(n, spread, field, rng, f64::exp)))
}

/// Deterministic per `(n, seed, spread)`.
pub fn random_spd(n: usize, seed: u64, spread: f64) -> Result<SpdMatrix> {
    random_spd_with(n, spread, Field::Complex, &mut rng_from_seed(seed))
}

/// Deterministic per `(n, seed, spread)`; spectrum uniform in `[−spread, spread]`.
pub fn random_hermitian(n: usize, seed: u64, spread: f64) -> Result<HermitianMatrix> {
    random_hermitian_with(n, spread, Field::Complex, &mut rng_from_seed(seed))
}
