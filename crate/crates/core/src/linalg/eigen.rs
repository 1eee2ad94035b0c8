//! Cyclic Jacobi eigendecomposition for Hermitian matrices.
//!
//! Each rotation first removes the phase of `a_pq` with a diagonal unitary and then
//! applies a real plane rotation, so the composite 2×2 transform is
//!
//! ```text
//! G = [ c            s          ]
//!     [ -s·e^{-iφ}   c·e^{-iφ}  ]      with a_pq = |a_pq| e^{iφ}
//! ```
//!
//! and `A ← G* A G`, `Q ← Q G`. A rotation is skipped once
//! `|a_pq| ≤ ε · sqrt(|a_pp a_qq|)`, which keeps small eigenvalues of positive definite
//! inputs accurate to high relative precision. The iteration stops after the first
//! sweep that performs no rotation.

use num_complex::Complex64;

use super::matrix::{frobenius, identity, CMat, HermitianMatrix, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::tol::MAX_SWEEPS;

/// Eigenvalues (descending) and the unitary whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub values: Vec<f64>,
    pub vectors: UnitaryMatrix,
}

impl EigenPair {
    /// `Q diag(f(λ)) Q*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMat {
        let q = self.vectors.matrix();
        let n = q.nrows();
        let mut scaled = q.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * q.adjoint()
    }

    /// `Q diag(g(λ)) Q*` for a complex-valued `g`.
    pub fn map_complex(&self, g: impl Fn(f64) -> Complex64) -> CMat {
        let q = self.vectors.matrix();
        let n = q.nrows();
        let mut scaled = q.clone();
        for j in 0..n {
            let gj = g(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= gj;
            }
        }
        scaled * q.adjoint()
    }

    pub fn reconstruct(&self) -> CMat {
        self.map(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix (values descending, stable on ties).
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<EigenPair> {
    m.eig().cloned()
}

const EPS: f64 = f64::EPSILON;

pub(crate) fn eig_hermitian_raw(m: &CMat) -> Result<EigenPair> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut q = identity(n);
    // absolute floor: entries this far below the matrix scale cannot move any eigenvalue
    let floor = frobenius(m) * 1e-30;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = a[(p, r)];
                let mag = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(r, r)].re;
                if mag <= floor || mag <= EPS * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                rotate(&mut a, &mut q, p, r, apq, mag, app, aqq);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Jacobi eigendecomposition",
            iterations: MAX_SWEEPS,
        });
    }

    let raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep the sweep order
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));
    let values = order.iter().map(|&i| raw[i]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(EigenPair {
        values,
        vectors: UnitaryMatrix::new_unchecked(vectors),
    })
}

#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut CMat, q: &mut CMat, p: usize, r: usize, apq: Complex64, mag: f64, app: f64, aqq: f64) {
    let n = a.nrows();
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let ph = phase.conj();
    let g00 = Complex64::new(cs, 0.0);
    let g01 = Complex64::new(sn, 0.0);
    let g10 = -ph * sn;
    let g11 = ph * cs;

    // A ← A G
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, r)];
        a[(k, p)] = x * g00 + y * g10;
        a[(k, r)] = x * g01 + y * g11;
    }
    // A ← G* A
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(r, k)];
        a[(p, k)] = g00.conj() * x + g10.conj() * y;
        a[(r, k)] = g01.conj() * x + g11.conj() * y;
    }
    a[(p, r)] = Complex64::new(0.0, 0.0);
    a[(r, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(r, r)] = Complex64::new(a[(r, r)].re, 0.0);
    // Q ← Q G
    for k in 0..n {
        let x = q[(k, p)];
        let y = q[(k, r)];
        q[(k, p)] = x * g00 + y * g10;
        q[(k, r)] = x * g01 + y * g11;
    }
}
