//! The Golden–Thompson complement chains
//!
//! ```text
//! φ(r) = (e^{rX} ♯ e^{rY})^{2/r}        ψ(r) = (e^{rX} ♮ e^{rY})^{2/r}
//! ```
//!
//! for Hermitian `X`, `Y` and `r > 0`. Along increasing `r`, `φ` decreases and `ψ`
//! increases in log-majorization, `e^{X+Y}` sits between them, and both converge to
//! it as `r → 0`. A [`ChainScan`] evaluates the chain on a grid; [`chain_verdicts`]
//! turns it into signed-margin predicates under any ordering comparator.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::funcs::{exp_h, pow_spd};
use crate::linalg::matrix::{max_norm, require_same_dim, HermitianMatrix, SpdMatrix};
use crate::linalg::spectrum::SpectrumVector;
use crate::majorization::{log_majorization_check, MajorizationCheck, Verdict};
use crate::means::{geometric_mean, spectral_mean};
use crate::tol::ORDER_TOL;

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::ParamOutOfRange { name: "r", value: r });
    }
    Ok(())
}

fn exp_pair(x: &HermitianMatrix, y: &HermitianMatrix, r: f64) -> Result<(SpdMatrix, SpdMatrix)> {
    require_same_dim(x.matrix(), y.matrix())?;
    check_r(r)?;
    Ok((exp_h(&x.scale(r))?, exp_h(&y.scale(r))?))
}

/// `φ(r) = (e^{rX} ♯ e^{rY})^{2/r}`.
pub fn phi(x: &HermitianMatrix, y: &HermitianMatrix, r: f64) -> Result<SpdMatrix> {
    let (a, b) = exp_pair(x, y, r)?;
    pow_spd(&geometric_mean(&a, &b, 0.5)?, 2.0 / r)
}

/// `ψ(r) = (e^{rX} ♮ e^{rY})^{2/r}`.
pub fn psi(x: &HermitianMatrix, y: &HermitianMatrix, r: f64) -> Result<SpdMatrix> {
    let (a, b) = exp_pair(x, y, r)?;
    pow_spd(&spectral_mean(&a, &b, 0.5)?, 2.0 / r)
}

/// Eigenvalues of `(e^{rX/2} e^{rY} e^{rX/2})^{1/r}`, descending. These coincide with
/// the eigenvalues of `ψ(r)`, which is unitarily conjugate to that matrix.
pub fn psi_spectrum_via_conjugation(x: &HermitianMatrix, y: &HermitianMatrix, r: f64) -> Result<Vec<f64>> {
    let (_, b) = exp_pair(x, y, r)?;
    let a_half = exp_h(&x.scale(r / 2.0))?;
    let sandwich = SpdMatrix::symmetrized(&(a_half.matrix() * b.matrix() * a_half.matrix()));
    pow_spd(&sandwich, 1.0 / r)?.eigenvalues()
}

/// `e^{X+Y}`.
pub fn exp_sum(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<SpdMatrix> {
    require_same_dim(x.matrix(), y.matrix())?;
    exp_h(&HermitianMatrix::symmetrized(&(x.matrix() + y.matrix())))
}

/// Eigenvalue half-width of the random Hermitian pairs used for chain scans.
///
/// At `r = 8` the means act on `e^{8X}`, whose condition number is `e^{16 · spread}`;
/// this keeps the whole default grid within double precision.
pub const CHAIN_SPREAD: f64 = 0.25;

/// The geometric grid `{2^k : k = −6, …, 3}`.
pub fn default_grid() -> Vec<f64> {
    (-6..=3).map(|k| 2f64.powi(k)).collect()
}

#[derive(Clone, Debug)]
pub struct ChainPoint {
    pub r: f64,
    pub phi: SpdMatrix,
    pub psi: SpdMatrix,
    pub phi_spectrum: SpectrumVector,
    pub psi_spectrum: SpectrumVector,
    pub trace_phi: f64,
    pub trace_psi: f64,
    /// `‖φ(r) − e^{X+Y}‖_max`
    pub dist_phi: f64,
    /// `‖ψ(r) − e^{X+Y}‖_max`
    pub dist_psi: f64,
}

#[derive(Clone, Debug)]
pub struct ChainScan {
    pub x: HermitianMatrix,
    pub y: HermitianMatrix,
    pub exp_sum: SpdMatrix,
    pub exp_sum_spectrum: SpectrumVector,
    pub points: Vec<ChainPoint>,
}

impl ChainScan {
    pub fn r_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.r).collect()
    }

    /// `(tr φ(r), tr ψ(r), tr e^{X+Y})` per grid point.
    pub fn traces(&self) -> Vec<(f64, f64, f64)> {
        let t = self.exp_sum.trace();
        self.points.iter().map(|p| (p.trace_phi, p.trace_psi, t)).collect()
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty);
    }
    for &r in grid {
        check_r(r)?;
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::ParamOutOfRange {
            name: "r_grid",
            value: w[1],
        });
    }
    Ok(())
}

/// Evaluates `φ`, `ψ` and `e^{X+Y}` on a strictly increasing positive grid.
/// Grid points are evaluated in parallel; the result keeps grid order.
pub fn scan_chain(x: &HermitianMatrix, y: &HermitianMatrix, grid: &[f64]) -> Result<ChainScan> {
    require_same_dim(x.matrix(), y.matrix())?;
    validate_grid(grid)?;
    let e = exp_sum(x, y)?;
    let points = grid
        .par_iter()
        .map(|&r| -> Result<ChainPoint> {
            let f = phi(x, y, r)?;
            let s = psi(x, y, r)?;
            Ok(ChainPoint {
                r,
                phi_spectrum: SpectrumVector::from_real(&f.eigenvalues()?),
                psi_spectrum: SpectrumVector::from_real(&s.eigenvalues()?),
                trace_phi: f.trace(),
                trace_psi: s.trace(),
                dist_phi: max_norm(&(f.matrix() - e.matrix())),
                dist_psi: max_norm(&(s.matrix() - e.matrix())),
                phi: f,
                psi: s,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainScan {
        x: x.clone(),
        y: y.clone(),
        exp_sum_spectrum: SpectrumVector::from_real(&e.eigenvalues()?),
        exp_sum: e,
        points,
    })
}

/// One evaluated predicate of a chain scan. `margin ≥ 0` means it holds outright.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainPredicate {
    pub name: &'static str,
    pub r: f64,
    pub margin: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChainVerdicts {
    pub predicates: Vec<ChainPredicate>,
}

impl ChainVerdicts {
    pub fn all_pass(&self) -> bool {
        self.predicates.iter().all(|p| p.verdict.is_pass())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ChainPredicate> {
        self.predicates.iter().filter(|p| !p.verdict.is_pass())
    }

    /// Smallest margin over all predicates (`+∞` when empty).
    pub fn worst_margin(&self) -> f64 {
        self.predicates.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min)
    }

    /// Verdict sequence of the ordering predicates, used to compare comparators.
    pub fn ordering_verdicts(&self) -> Vec<(&'static str, f64, bool)> {
        self.predicates
            .iter()
            .filter(|p| ORDERING_PREDICATES.contains(&p.name))
            .map(|p| (p.name, p.r, p.verdict.is_pass()))
            .collect()
    }

    fn push_check(&mut self, name: &'static str, r: f64, c: MajorizationCheck) {
        self.predicates.push(ChainPredicate {
            name,
            r,
            margin: c.margin,
            tol: c.tol,
            verdict: Verdict::from_check(&c),
        });
    }

    fn push_leq(&mut self, name: &'static str, r: f64, lhs: f64, rhs: f64) {
        let tol = ORDER_TOL * (lhs.abs() + rhs.abs());
        let margin = rhs - lhs;
        self.push_check(
            name,
            r,
            MajorizationCheck {
                holds: margin >= -tol,
                margin,
                tol,
            },
        );
    }
}

const ORDERING_PREDICATES: [&str; 4] = ["phi.decreasing", "psi.increasing", "phi.below.exp", "exp.below.psi"];

/// An ordering comparator: `cmp(f, g)` checks `f ≺ g`.
pub trait Comparator: Fn(&SpdMatrix, &SpdMatrix) -> Result<MajorizationCheck> + Sync {}
impl<F: Fn(&SpdMatrix, &SpdMatrix) -> Result<MajorizationCheck> + Sync> Comparator for F {}

/// Log-majorization of eigenvalues.
pub fn eigenvalue_log_majorization(f: &SpdMatrix, g: &SpdMatrix) -> Result<MajorizationCheck> {
    log_majorization_check(&f.eigenvalues()?, &g.eigenvalues()?)
}

/// Evaluates every chain predicate:
///
/// * `phi.decreasing` / `psi.increasing` between consecutive grid points (tagged with the larger `r`),
/// * `phi.below.exp` / `exp.below.psi` at each point,
/// * the trace chain and its monotonicity,
/// * `trace.psi.below.product`: `tr ψ(r) ≤ tr e^X e^Y` for grid points `r ≤ 1`,
/// * `distance.phi.shrinks` / `distance.psi.shrinks`: strict decrease of the max-norm
///   distance to `e^{X+Y}` towards smaller `r` (exempt when both distances are roundoff).
pub fn chain_verdicts(scan: &ChainScan, cmp: &impl Comparator) -> Result<ChainVerdicts> {
    let mut out = ChainVerdicts::default();
    let e = &scan.exp_sum;
    let tr_e = e.trace();
    let tr_gt = golden_thompson_product_trace(&scan.x, &scan.y)?;
    let roundoff = 1e-12 * (1.0 + max_norm(e.matrix()));
    for (i, p) in scan.points.iter().enumerate() {
        out.push_check("phi.below.exp", p.r, cmp(&p.phi, e)?);
        out.push_check("exp.below.psi", p.r, cmp(e, &p.psi)?);
        out.push_leq("trace.phi.below.exp", p.r, p.trace_phi, tr_e);
        out.push_leq("trace.exp.below.psi", p.r, tr_e, p.trace_psi);
        if p.r <= 1.0 {
            out.push_leq("trace.psi.below.product", p.r, p.trace_psi, tr_gt);
        }
        if i == 0 {
            continue;
        }
        let q = &scan.points[i - 1];
        out.push_check("phi.decreasing", p.r, cmp(&p.phi, &q.phi)?);
        out.push_check("psi.increasing", p.r, cmp(&q.psi, &p.psi)?);
        out.push_leq("trace.phi.decreasing", p.r, p.trace_phi, q.trace_phi);
        out.push_leq("trace.psi.increasing", p.r, q.trace_psi, p.trace_psi);
        for (name, small, large) in [
            ("distance.phi.shrinks", q.dist_phi, p.dist_phi),
            ("distance.psi.shrinks", q.dist_psi, p.dist_psi),
        ] {
            let margin = large - small;
            let pass = margin > 0.0 || large.max(small) <= roundoff;
            out.predicates.push(ChainPredicate {
                name,
                r: p.r,
                margin,
                tol: 0.0,
                verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            });
        }
    }
    Ok(out)
}

/// `tr e^X e^Y`.
pub fn golden_thompson_product_trace(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64> {
    require_same_dim(x.matrix(), y.matrix())?;
    let (a, b) = (exp_h(x)?, exp_h(y)?);
    Ok((a.matrix() * b.matrix()).trace().re)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldenThompsonRefinement {
    pub trace_exp_sum: f64,
    pub trace_psi: f64,
    pub trace_product: f64,
}

impl GoldenThompsonRefinement {
    /// `tr e^{X+Y} ≤ tr ψ(r) ≤ tr e^X e^Y` up to relative roundoff.
    pub fn holds(&self) -> bool {
        let tol = ORDER_TOL * self.trace_product.abs().max(1.0);
        self.trace_exp_sum <= self.trace_psi + tol && self.trace_psi <= self.trace_product + tol
    }
}

/// The refinement of Golden–Thompson supplied by `ψ` for `0 < r ≤ 1`.
pub fn golden_thompson_refinement(x: &HermitianMatrix, y: &HermitianMatrix, r: f64) -> Result<GoldenThompsonRefinement> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::ParamOutOfRange { name: "r", value: r });
    }
    Ok(GoldenThompsonRefinement {
        trace_exp_sum: exp_sum(x, y)?.trace(),
        trace_psi: psi(x, y, r)?.trace(),
        trace_product: golden_thompson_product_trace(x, y)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{diag, rel_diff};
    use crate::random::{random_hermitian_with, rng_from_seed, Field};

    fn pair_with(seed: u64, n: usize, spread: f64) -> (HermitianMatrix, HermitianMatrix) {
        let mut rng = rng_from_seed(seed);
        (
            random_hermitian_with(n, spread, Field::Complex, &mut rng).unwrap(),
            random_hermitian_with(n, spread, Field::Complex, &mut rng).unwrap(),
        )
    }

    fn pair(seed: u64, n: usize) -> (HermitianMatrix, HermitianMatrix) {
        pair_with(seed, n, CHAIN_SPREAD)
    }

    #[test]
    fn equal_arguments_give_exp_2x() {
        let (x, _) = pair(1, 4);
        let want = exp_h(&x.scale(2.0)).unwrap();
        for r in [0.125, 1.0, 3.0] {
            assert!(rel_diff(phi(&x, &x, r).unwrap().matrix(), want.matrix()) < 1e-11);
            assert!(rel_diff(psi(&x, &x, r).unwrap().matrix(), want.matrix()) < 1e-11);
        }
    }

    #[test]
    fn commuting_pair_collapses_to_exp_sum() {
        let x = HermitianMatrix::new(diag(&[0.5, -0.2, 0.1])).unwrap();
        let y = HermitianMatrix::new(diag(&[-0.3, 0.4, 0.9])).unwrap();
        let e = exp_sum(&x, &y).unwrap();
        let scan = scan_chain(&x, &y, &default_grid()).unwrap();
        for p in &scan.points {
            assert!(rel_diff(p.phi.matrix(), e.matrix()) < 1e-11);
            assert!(rel_diff(p.psi.matrix(), e.matrix()) < 1e-11);
        }
        let v = chain_verdicts(&scan, &eigenvalue_log_majorization).unwrap();
        assert!(v.all_pass(), "{:?}", v.failures().collect::<Vec<_>>());
    }

    #[test]
    fn psi_spectrum_matches_conjugation_identity() {
        for seed in 0..30 {
            let (x, y) = pair(seed, 2 + seed as usize % 5);
            for r in [0.25, 1.0, 2.0] {
                let a = psi(&x, &y, r).unwrap().eigenvalues().unwrap();
                let b = psi_spectrum_via_conjugation(&x, &y, r).unwrap();
                for (u, v) in a.iter().zip(&b) {
                    assert!((u - v).abs() <= 1e-9 * v.abs(), "seed {seed} r {r}");
                }
            }
        }
    }

    #[test]
    fn random_chain_predicates_hold() {
        for seed in 0..20 {
            let (x, y) = pair(100 + seed, 2 + seed as usize % 5);
            let scan = scan_chain(&x, &y, &default_grid()).unwrap();
            let v = chain_verdicts(&scan, &eigenvalue_log_majorization).unwrap();
            assert!(v.all_pass(), "seed {seed}: {:?}", v.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn wider_spectra_on_the_small_r_half_of_the_grid() {
        let grid: Vec<f64> = (-6..=0).map(|k| 2f64.powi(k)).collect();
        for seed in 0..20 {
            let (x, y) = pair_with(200 + seed, 2 + seed as usize % 5, 1.0);
            let scan = scan_chain(&x, &y, &grid).unwrap();
            let v = chain_verdicts(&scan, &eigenvalue_log_majorization).unwrap();
            assert!(v.all_pass(), "seed {seed}: {:?}", v.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn golden_thompson_refinement_holds() {
        for seed in 0..30 {
            let (x, y) = pair(500 + seed, 4);
            for r in [1.0, 0.5] {
                let g = golden_thompson_refinement(&x, &y, r).unwrap();
                assert!(g.holds(), "{g:?}");
            }
            let g = golden_thompson_refinement(&x, &y, 1.0).unwrap();
            assert!((g.trace_psi - g.trace_product).abs() < 1e-10 * g.trace_product);
        }
        let (x, y) = pair(1, 2);
        assert!(golden_thompson_refinement(&x, &y, 2.0).is_err());
    }

    #[test]
    fn bad_parameters() {
        let (x, y) = pair(3, 3);
        assert!(matches!(phi(&x, &y, 0.0), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(psi(&x, &y, -1.0), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(scan_chain(&x, &y, &[]), Err(Error::Empty)));
        assert!(scan_chain(&x, &y, &[1.0, 0.5]).is_err());
        let (z, _) = pair(3, 2);
        assert!(matches!(phi(&x, &z, 1.0), Err(Error::DimensionMismatch { .. })));
    }
}
