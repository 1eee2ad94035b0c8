//! Majorization, log-majorization and compound matrices.
//!
//! `x ≺ y` when the decreasingly sorted partial sums of `x` never exceed those of
//! `y` and the totals agree. Log-majorization is majorization of the logarithms.
//! Comparisons carry the tolerance `1e-9 · (1 + max|entry|)` on the (log) vectors.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::matrix::{rel_diff, require_same_dim, CMat, ComplexMatrix, HermitianMatrix, SpdMatrix};
use crate::means::{check_unit_interval, geometric_mean, spectral_mean};
use crate::tol::maj_tol;

/// Outcome of a majorization comparison.
///
/// `margin` is the smallest slack: `min_k (Σ_{i≤k} y_[i] − Σ_{i≤k} x_[i])` over
/// `k < n`, together with `−|Σx − Σy|`. The relation holds when `margin ≥ −tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MajorizationCheck {
    pub holds: bool,
    pub margin: f64,
    pub tol: f64,
}

impl MajorizationCheck {
    pub fn violation(&self) -> f64 {
        (-self.margin).max(0.0)
    }
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Partial-sum comparison of `x ≺ y`.
pub fn majorization_check(x: &[f64], y: &[f64]) -> Result<MajorizationCheck> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let tol = maj_tol(x, y);
    let xs = sorted_desc(x);
    let ys = sorted_desc(y);
    let n = xs.len();
    let mut margin = f64::INFINITY;
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..n {
        sx += xs[k];
        sy += ys[k];
        let slack = if k + 1 < n { sy - sx } else { -(sx - sy).abs() };
        margin = margin.min(slack);
    }
    if n == 0 {
        margin = 0.0;
    }
    Ok(MajorizationCheck {
        holds: margin >= -tol,
        margin,
        tol,
    })
}

/// `x ≺ y`.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(majorization_check(x, y)?.holds)
}

fn logs(v: &[f64]) -> Result<Vec<f64>> {
    v.iter()
        .map(|&e| {
            if e > 0.0 && e.is_finite() {
                Ok(e.ln())
            } else {
                Err(Error::NonPositiveEntry(e))
            }
        })
        .collect()
}

/// `x ≺_log y`, checked as `log x ≺ log y`.
pub fn log_majorization_check(x: &[f64], y: &[f64]) -> Result<MajorizationCheck> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    majorization_check(&logs(x)?, &logs(y)?)
}

pub fn log_majorizes(x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(log_majorization_check(x, y)?.holds)
}

/// Number of `k`-subsets of `n` elements.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `k`-th compound: the `C(n,k) × C(n,k)` matrix of `k × k` minors, rows and
/// columns indexed by lexicographically ordered `k`-subsets.
pub fn compound(a: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::new(compound_raw(a.matrix(), k)?)
}

pub(crate) fn compound_raw(a: &CMat, k: usize) -> Result<CMat> {
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::ParamOutOfRange {
            name: "k",
            value: k as f64,
        });
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let m = subsets.len();
    Ok(CMat::from_fn(m, m, |i, j| {
        let rows = &subsets[i];
        let cols = &subsets[j];
        CMat::from_fn(k, k, |p, q| a[(rows[p], cols[q])]).determinant()
    }))
}

/// Compound of a positive definite matrix, itself positive definite.
pub fn compound_spd(a: &SpdMatrix, k: usize) -> Result<SpdMatrix> {
    SpdMatrix::new(HermitianMatrix::new(compound_raw(a.matrix(), k)?)?)
}

/// Three-way verdict for checks backed by an exact theorem: a violation up to ten
/// tolerances is attributed to roundoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    PassWithWarning,
    Fail,
}

impl Verdict {
    pub fn from_check(c: &MajorizationCheck) -> Self {
        let v = c.violation();
        if v <= c.tol {
            Verdict::Pass
        } else if v <= 10.0 * c.tol {
            Verdict::PassWithWarning
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self != Verdict::Fail
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeansLogMajorization {
    pub verdict: Verdict,
    pub check: MajorizationCheck,
    pub sharp_eigenvalues: Vec<f64>,
    pub natural_eigenvalues: Vec<f64>,
}

/// `λ(A ♯_t B) ≺_log λ(A ♮_t B)` with its margin.
pub fn log_majorization_means_report(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<MeansLogMajorization> {
    check_unit_interval("t", t)?;
    let g = geometric_mean(a, b, t)?.eigenvalues()?;
    let n = spectral_mean(a, b, t)?.eigenvalues()?;
    let check = log_majorization_check(&g, &n)?;
    Ok(MeansLogMajorization {
        verdict: Verdict::from_check(&check),
        check,
        sharp_eigenvalues: g,
        natural_eigenvalues: n,
    })
}

/// True unless the violation exceeds ten tolerances.
pub fn check_log_majorization_means(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<bool> {
    Ok(log_majorization_means_report(a, b, t)?.verdict.is_pass())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompoundReport {
    /// `‖C_k(A ♯_t B) − C_k(A) ♯_t C_k(B)‖` relative.
    pub sharp_residual: f64,
    /// `‖C_k(A ♮_t B) − C_k(A) ♮_t C_k(B)‖` relative.
    pub natural_residual: f64,
}

impl CompoundReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.sharp_residual <= tol && self.natural_residual <= tol
    }
}

pub fn check_compound_mean_identities(a: &SpdMatrix, b: &SpdMatrix, t: f64, k: usize) -> Result<CompoundReport> {
    require_same_dim(a.matrix(), b.matrix())?;
    check_unit_interval("t", t)?;
    let ca = compound_spd(a, k)?;
    let cb = compound_spd(b, k)?;
    let lhs_g = compound_raw(geometric_mean(a, b, t)?.matrix(), k)?;
    let rhs_g = geometric_mean(&ca, &cb, t)?;
    let lhs_n = compound_raw(spectral_mean(a, b, t)?.matrix(), k)?;
    let rhs_n = spectral_mean(&ca, &cb, t)?;
    Ok(CompoundReport {
        sharp_residual: rel_diff(&lhs_g, rhs_g.matrix()),
        natural_residual: rel_diff(&lhs_n, rhs_n.matrix()),
    })
}
