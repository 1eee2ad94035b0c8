//! The t-geometric mean and the t-spectral mean of positive definite matrices.
//!
//! ```text
//! A ♯_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}
//! A ♮_t B = (A^{-1} ♯ B)^t  A  (A^{-1} ♯ B)^t
//! ```
//!
//! Both are evaluated literally through eigendecompositions. The similarity
//! shortcuts relating them are properties checked by [`mean_identity_suite`], so
//! they never appear on the computation path.

use crate::error::{Error, Result};
use crate::linalg::funcs::{inv_spd, pow_spd};
use crate::linalg::matrix::{max_norm, rel_diff, require_same_dim, CMat, HermitianMatrix, SpdMatrix, UnitaryMatrix};
use crate::linalg::polar::{polar_raw, PolarSide};
use crate::tol::{IDENTITY_TOL, ORDER_TOL};

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParamOutOfRange { name, value });
    }
    Ok(())
}

/// `A ♯_t B`.
pub fn geometric_mean(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    require_same_dim(a.matrix(), b.matrix())?;
    check_unit_interval("t", t)?;
    let a_half = pow_spd(a, 0.5)?;
    let a_mhalf = pow_spd(a, -0.5)?;
    let inner = SpdMatrix::symmetrized(&(a_mhalf.matrix() * b.matrix() * a_mhalf.matrix()));
    let inner_t = pow_spd(&inner, t)?;
    Ok(SpdMatrix::symmetrized(
        &(a_half.matrix() * inner_t.matrix() * a_half.matrix()),
    ))
}

/// `A ♮_t B`.
pub fn spectral_mean(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    require_same_dim(a.matrix(), b.matrix())?;
    check_unit_interval("t", t)?;
    let c = geometric_mean(&inv_spd(a)?, b, 0.5)?;
    let ct = pow_spd(&c, t)?;
    Ok(SpdMatrix::symmetrized(&(ct.matrix() * a.matrix() * ct.matrix())))
}

/// The unitary `U` with `A ♮ B = U (A^{1/2} B A^{1/2})^{1/2} U*`.
///
/// `U` is the unitary factor of the right polar decomposition of
/// `g = (A^{-1} ♯ B)^{1/2} A^{1/2}`: with `g = U P` we get `gg* = A ♮ B` and
/// `g*g = P² = (A^{1/2} B A^{1/2})^{1/2}`.
pub fn spectral_mean_unitary(a: &SpdMatrix, b: &SpdMatrix) -> Result<UnitaryMatrix> {
    require_same_dim(a.matrix(), b.matrix())?;
    let c = geometric_mean(&inv_spd(a)?, b, 0.5)?;
    let g = pow_spd(&c, 0.5)?.matrix() * pow_spd(a, 0.5)?.matrix();
    let (u, _) = polar_raw(&g, PolarSide::Right)?;
    Ok(u)
}

/// Löwner order `A ≤ B`: `λ_min(B − A) ≥ −ORDER_TOL · ‖B − A‖_max`.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<bool> {
    require_same_dim(a.matrix(), b.matrix())?;
    let d = HermitianMatrix::symmetrized(&(b.matrix() - a.matrix()));
    let scale = max_norm(d.matrix());
    let min = *d.eig()?.values.last().expect("non-empty");
    Ok(min >= -ORDER_TOL * scale)
}

/// Parameters of the interpolation laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanParams {
    pub t: f64,
    pub r: f64,
    pub s: f64,
}

impl MeanParams {
    pub fn new(t: f64, r: f64, s: f64) -> Result<Self> {
        check_unit_interval("t", t)?;
        check_unit_interval("r", r)?;
        check_unit_interval("s", s)?;
        Ok(Self { t, r, s })
    }

    /// The reparameterization laws `p ∘_{r+s} q = (p ∘_r q) ∘_{s/(1−r)} q` need
    /// `r + s ≤ 1` and `r < 1`.
    pub fn reparam_applies(&self) -> bool {
        self.r + self.s <= 1.0 && self.r < 1.0
    }
}

/// One named identity and its relative max-norm residual.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityReport {
    pub residuals: Vec<IdentityResidual>,
}

impl IdentityReport {
    pub fn worst(&self) -> f64 {
        self.residuals.iter().fold(0.0, |acc, r| acc.max(r.residual))
    }

    pub fn passes(&self) -> bool {
        self.residuals.iter().all(|r| r.residual <= IDENTITY_TOL)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|r| r.name == name).map(|r| r.residual)
    }

    fn push(&mut self, name: &'static str, residual: f64) {
        self.residuals.push(IdentityResidual { name, residual });
    }
}

fn rel_scalar(x: f64, y: f64) -> f64 {
    let s = x.abs().max(y.abs());
    if s == 0.0 {
        0.0
    } else {
        (x - y).abs() / s
    }
}

/// `c m c`.
fn congruence(c: &CMat, m: &CMat) -> CMat {
    c * m * c
}

/// Every identity law of the two means, evaluated on one pair.
///
/// Reparameterization laws are skipped when `r + s > 1` or `r = 1`.
pub fn mean_identity_suite(a: &SpdMatrix, b: &SpdMatrix, p: MeanParams) -> Result<IdentityReport> {
    require_same_dim(a.matrix(), b.matrix())?;
    let MeanParams { t, r, s } = MeanParams::new(p.t, p.r, p.s)?;
    let gm = geometric_mean;
    let nm = spectral_mean;
    let ai = inv_spd(a)?;
    let bi = inv_spd(b)?;
    let mut rep = IdentityReport::default();

    // inverse laws
    let n_half = nm(a, b, 0.5)?;
    rep.push(
        "natural.inverse.half",
        rel_diff(inv_spd(&n_half)?.matrix(), nm(&ai, &bi, 0.5)?.matrix()),
    );
    let n_t = nm(a, b, t)?;
    rep.push(
        "natural.inverse",
        rel_diff(inv_spd(&n_t)?.matrix(), nm(&ai, &bi, t)?.matrix()),
    );
    let g_t = gm(a, b, t)?;
    rep.push(
        "sharp.inverse",
        rel_diff(inv_spd(&g_t)?.matrix(), gm(&ai, &bi, t)?.matrix()),
    );

    // symmetry laws
    let n_swap = nm(b, a, 1.0 - t)?;
    rep.push("natural.swap", rel_diff(n_t.matrix(), n_swap.matrix()));
    rep.push("sharp.swap", rel_diff(g_t.matrix(), gm(b, a, 1.0 - t)?.matrix()));

    // A^{-1} ♯ (A ♮ B) = (A ♮ B)^{-1} ♯ B
    rep.push(
        "natural.sharp_bridge.half",
        rel_diff(
            gm(&ai, &n_half, 0.5)?.matrix(),
            gm(&inv_spd(&n_half)?, b, 0.5)?.matrix(),
        ),
    );

    // A^{-1} ♯ (A ♮_t B) = (B ♮_t A)^{-1} ♯ B = (A^{-1} ♯ B)^t
    let c1 = gm(&ai, b, 0.5)?;
    let c_t = pow_spd(&c1, t)?;
    let bridge = gm(&ai, &n_t, 0.5)?;
    rep.push("natural.sharp_bridge", rel_diff(bridge.matrix(), c_t.matrix()));
    let b_over_a = nm(b, a, t)?;
    rep.push(
        "natural.sharp_bridge.swapped",
        rel_diff(gm(&inv_spd(&b_over_a)?, b, 0.5)?.matrix(), c_t.matrix()),
    );

    // C = A^{-1} ♯ (A ♮ B):  A ♮ B = C A C = C^{-1} B C^{-1}
    let c_half = gm(&ai, &n_half, 0.5)?;
    let c_half_inv = inv_spd(&c_half)?;
    rep.push(
        "natural.congruence.half.left",
        rel_diff(n_half.matrix(), &congruence(c_half.matrix(), a.matrix())),
    );
    rep.push(
        "natural.congruence.half.right",
        rel_diff(n_half.matrix(), &congruence(c_half_inv.matrix(), b.matrix())),
    );

    // C_t = A^{-1} ♯ (A ♮_t B):  A ♮_t B = C_t A C_t,  B ♮_t A = C_t^{-1} B C_t^{-1}
    let bridge_inv = inv_spd(&bridge)?;
    rep.push(
        "natural.congruence.left",
        rel_diff(n_t.matrix(), &congruence(bridge.matrix(), a.matrix())),
    );
    rep.push(
        "natural.congruence.right",
        rel_diff(b_over_a.matrix(), &congruence(bridge_inv.matrix(), b.matrix())),
    );

    // (A ♮_r B) ♮_t (A ♮_s B) = A ♮_{(1−t)r+ts} B
    let lhs = nm(&nm(a, b, r)?, &nm(a, b, s)?, t)?;
    let rhs = nm(a, b, (1.0 - t) * r + t * s)?;
    rep.push("natural.interpolation", rel_diff(lhs.matrix(), rhs.matrix()));

    if p.reparam_applies() {
        let w = s / (1.0 - r);
        let lhs = gm(a, b, r + s)?;
        let rhs = gm(&gm(a, b, r)?, b, w)?;
        rep.push("sharp.reparam", rel_diff(lhs.matrix(), rhs.matrix()));
        let lhs = nm(a, b, r + s)?;
        let rhs = nm(&nm(a, b, r)?, b, w)?;
        rep.push("natural.reparam", rel_diff(lhs.matrix(), rhs.matrix()));
    }

    // g = A ♯ B  ⇔  B = g A^{-1} g
    let g_half = gm(a, b, 0.5)?;
    rep.push(
        "sharp.riccati",
        rel_diff(&congruence(g_half.matrix(), ai.matrix()), b.matrix()),
    );
    let q = SpdMatrix::symmetrized(&congruence(b.matrix(), ai.matrix()));
    rep.push(
        "sharp.riccati.converse",
        rel_diff(gm(a, &q, 0.5)?.matrix(), b.matrix()),
    );

    // determinants
    let want = a.det()?.powf(1.0 - t) * b.det()?.powf(t);
    rep.push("sharp.det", rel_scalar(g_t.det()?, want));
    rep.push("natural.det", rel_scalar(n_t.det()?, want));

    // joint homogeneity
    let (alpha, beta) = (2.0_f64, 1.0_f64 / 3.0);
    let factor = alpha.powf(1.0 - t) * beta.powf(t);
    let (sa, sb) = (a.scale(alpha)?, b.scale(beta)?);
    rep.push(
        "sharp.homogeneity",
        rel_diff(gm(&sa, &sb, t)?.matrix(), &g_t.matrix().scale(factor)),
    );
    rep.push(
        "natural.homogeneity",
        rel_diff(nm(&sa, &sb, t)?.matrix(), &n_t.matrix().scale(factor)),
    );

    Ok(rep)
}
