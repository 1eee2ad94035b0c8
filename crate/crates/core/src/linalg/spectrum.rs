//! Eigenvalues of general complex matrices.
//!
//! Hermitian inputs go through Jacobi. Everything else is reduced to upper
//! Hessenberg form with Householder reflectors and then iterated with single-shift
//! complex QR steps (Wilkinson shift, Givens rotations) on the active block until
//! every subdiagonal entry deflates.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::matrix::{max_norm, CMat, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tol::{HERMITIAN_TOL, IMAG_TRUNCATE_TOL};

/// Eigenvalues sorted by modulus descending, ties by argument ascending in (−π, π].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumVector(Vec<Complex64>);

impl SpectrumVector {
    pub fn new(mut values: Vec<Complex64>) -> Self {
        sort_spectrum(&mut values);
        Self(values)
    }

    /// Real eigenvalues, sorted by modulus.
    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|v| Complex64::new(*v, 0.0)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm()).collect()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }
}

fn arg_key(z: &Complex64) -> f64 {
    // atan2 gives [−π, π]; map −π onto π so the range is (−π, π]
    let a = z.arg();
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

fn sort_spectrum(values: &mut [Complex64]) {
    let scale = values.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let tie = 1e-12 * scale;
    values.sort_by(|a, b| {
        let (ma, mb) = (a.norm(), b.norm());
        if (ma - mb).abs() <= tie {
            arg_key(a).total_cmp(&arg_key(b))
        } else {
            mb.partial_cmp(&ma).unwrap_or(Ordering::Equal)
        }
    });
}

/// Complex eigenvalues of `m`.
pub fn spectrum(m: &ComplexMatrix) -> Result<SpectrumVector> {
    let a = m.matrix();
    let scale = max_norm(a);
    let dev = max_norm(&(a - a.adjoint()));
    if scale == 0.0 || dev <= HERMITIAN_TOL * scale {
        let h = super::matrix::HermitianMatrix::symmetrized(a);
        return Ok(SpectrumVector::from_real(&h.eig()?.values));
    }
    spectrum_general(a)
}

/// Hessenberg-QR path regardless of structure.
pub fn spectrum_general(a: &CMat) -> Result<SpectrumVector> {
    let mut vals = hessenberg_qr_eigenvalues(a)?;
    let scale = vals.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    for z in vals.iter_mut() {
        if z.im.abs() <= IMAG_TRUNCATE_TOL * scale {
            z.im = 0.0;
        }
    }
    Ok(SpectrumVector::new(vals))
}

fn hessenberg(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        // reflector annihilating h[k+2.., k]
        let alpha_norm: f64 = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← (I − 2vv*/‖v‖²) H (I − 2vv*/‖v‖²)
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (idx, i) in ((k + 1)..n).enumerate() {
                s += v[idx].conj() * h[(i, j)];
            }
            let f = s * (2.0 / vnorm2);
            for (idx, i) in ((k + 1)..n).enumerate() {
                h[(i, j)] -= v[idx] * f;
            }
        }
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (idx, j) in ((k + 1)..n).enumerate() {
                s += h[(i, j)] * v[idx];
            }
            let f = s * (2.0 / vnorm2);
            for (idx, j) in ((k + 1)..n).enumerate() {
                h[(i, j)] -= f * v[idx].conj();
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let r = (ax * ax + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    (ax / r, (x / ax) * y.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

fn hessenberg_qr_eigenvalues(a: &CMat) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let mut h = hessenberg(a);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n == 1 {
        out[0] = h[(0, 0)];
        return Ok(out);
    }
    let max_total = 100 * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let eps = f64::EPSILON;
    loop {
        if hi == 0 {
            out[0] = h[(0, 0)];
            break;
        }
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = max_norm(&h);
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_total {
            return Err(Error::NoConvergence {
                what: "Hessenberg QR iteration",
                iterations: total,
            });
        }
        let mu = if since_deflation.is_multiple_of(11) {
            // exceptional shift
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let u = h[(k, j)];
                let v = h[(k + 1, j)];
                h[(k, j)] = u * cs + sn * v;
                h[(k + 1, j)] = -sn.conj() * u + v * cs;
            }
            rots.push((cs, sn));
        }
        for (idx, k) in (lo..hi).enumerate() {
            let (cs, sn) = rots[idx];
            let last = (k + 2).min(hi);
            for i in lo..=last {
                let u = h[(i, k)];
                let v = h[(i, k + 1)];
                h[(i, k)] = u * cs + v * sn.conj();
                h[(i, k + 1)] = -u * sn + v * cs;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{c, diag, from_real_rows};
    use crate::random::{random_hermitian, random_spd, rng_from_seed};
    use rand_distr::{Distribution, StandardNormal};

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn sort_rule() {
        let mut m = CMat::zeros(3, 3);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(-2.0, 0.0);
        m[(2, 2)] = c(0.0, 3.0);
        let s = spectrum(&ComplexMatrix::new(m).unwrap()).unwrap();
        assert_eq!(s.values(), &[c(0.0, 3.0), c(-2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn ties_by_argument() {
        let s = SpectrumVector::new(vec![c(-1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(
            s.values(),
            &[c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]
        );
    }

    #[test]
    fn hermitian_agrees_with_general_path() {
        for seed in 0..30 {
            let h = random_hermitian(2 + seed as usize % 7, seed, 2.0).unwrap();
            let fast = spectrum(&ComplexMatrix::new(h.matrix().clone()).unwrap()).unwrap();
            let slow = spectrum_general(h.matrix()).unwrap();
            assert!(close(fast.values(), slow.values(), 1e-12), "seed {seed}");
            assert!(slow.is_real());
            let mut jac = h.eigenvalues().unwrap();
            jac.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
            let re = fast.real_parts();
            assert!(re.iter().zip(&jac).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn product_of_spd_has_positive_spectrum() {
        for seed in 0..30 {
            let n = 2 + seed as usize % 6;
            let a = random_spd(n, seed, 2.0).unwrap();
            let b = random_spd(n, seed + 1000, 2.0).unwrap();
            let ab = a.matrix() * b.matrix();
            let s = spectrum(&ComplexMatrix::new(ab).unwrap()).unwrap();
            assert!(s.is_real());
            // oracle: A^{1/2} B A^{1/2} is Hermitian and similar to AB
            let ah = crate::linalg::funcs::sqrt_spd(&a).unwrap();
            let sim = crate::linalg::matrix::HermitianMatrix::symmetrized(
                &(ah.matrix() * b.matrix() * ah.matrix()),
            );
            let want = sim.eigenvalues().unwrap();
            for (got, w) in s.real_parts().iter().zip(&want) {
                assert!(*got > 0.0);
                assert!((got - w).abs() <= 1e-10 * want[0], "seed {seed}");
            }
        }
    }

    #[test]
    fn general_random_matrix_trace_and_det() {
        for seed in 0..40 {
            let n = 2 + seed as usize % 8;
            let mut rng = rng_from_seed(seed);
            let m = CMat::from_fn(n, n, |_, _| {
                c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let s = spectrum_general(&m).unwrap();
            let tr: Complex64 = s.values().iter().sum();
            let det: Complex64 = s.values().iter().product();
            assert!((tr - m.trace()).norm() < 1e-10 * n as f64);
            assert!((det - m.determinant()).norm() < 1e-9 * det.norm().max(1.0));
        }
    }

    #[test]
    fn unipotent_and_rotation() {
        let j = from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let s = spectrum_general(&j).unwrap();
        assert!(close(s.values(), &[c(1.0, 0.0), c(1.0, 0.0)], 1e-12));
        let r = from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let s = spectrum_general(&r).unwrap();
        assert!(close(s.values(), &[c(0.0, -1.0), c(0.0, 1.0)], 1e-12));
        let d = spectrum_general(&diag(&[3.0, -5.0, 1.0])).unwrap();
        assert!(close(d.values(), &[c(-5.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)], 0.0));
    }
}
