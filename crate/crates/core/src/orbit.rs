//! Solving `UXU* + VYV* = Z` over pairs of unitaries.
//!
//! The objective `f(U, V) = ½‖UXU* + VYV* − Z‖²_F` is minimized by steepest descent
//! on `U(n) × U(n)` with an Armijo backtracking line search and the exponential
//! retraction `U ← e^{−ηK_U} U`. With `A = UXU*`, `B = VYV*` and `R = A + B − Z`,
//! the Riemannian gradient is the pair of skew-Hermitian commutators
//! `K_U = [R, A]`, `K_V = [R, B]`, normalized so that the derivative of
//! `f(e^{εK}U, V)` at `ε = 0` is `⟨K, K_U⟩_F = Re tr(K* K_U)`.
//!
//! Steepest descent is the first phase of every run. When it has not converged
//! after `gradient_iters` iterations, the search direction switches to the
//! Levenberg–Marquardt step of the linearized residual
//! `R + [K, A] + [L, B]` with damping `μ = ‖R‖_F`, under the same line search and
//! retraction. Nearly scalar generators make the steepest-descent landscape
//! extremely ill-conditioned; the damped Gauss–Newton step is invariant to that
//! scaling and converges quadratically on these zero-residual problems.
//!
//! A run that stalls restarts from seeded random unitaries (rotations in the real
//! realization). For real symmetric data the commutators are real, so the iterates
//! stay in `SO(n)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::funcs::{exp_h, log_spd, SkewExp};
use crate::linalg::matrix::{c, frobenius, max_norm, require_same_dim, CMat, HermitianMatrix, SpdMatrix, UnitaryMatrix};
use crate::means::{geometric_mean, spectral_mean};
use crate::random::{random_orthogonal, random_unitary, rng_from_seed};
use crate::realization::Realization;
use crate::tol::{ORBIT_EIG_TOL, ORBIT_TOL, UNITARY_TOL};

/// Which point of `O(X) + O(Y)` to reach.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetKind {
    /// `Z = log(e^{X/2} e^Y e^{X/2})`
    ExpProduct,
    /// `Z = log(e^{2X} ♯ e^{2Y})`
    Geometric,
    /// `Z = log(e^{2X} ♮ e^{2Y})`
    Spectral,
}

impl TargetKind {
    pub const ALL: [TargetKind; 3] = [TargetKind::ExpProduct, TargetKind::Geometric, TargetKind::Spectral];

    pub fn tag(self) -> &'static str {
        match self {
            TargetKind::ExpProduct => "exp",
            TargetKind::Geometric => "geo",
            TargetKind::Spectral => "spec",
        }
    }
}

pub fn build_target(x: &HermitianMatrix, y: &HermitianMatrix, kind: TargetKind) -> Result<HermitianMatrix> {
    require_same_dim(x.matrix(), y.matrix())?;
    let arg = match kind {
        TargetKind::ExpProduct => {
            let h = exp_h(&x.scale(0.5))?;
            let e = exp_h(y)?;
            SpdMatrix::from_matrix(h.matrix() * e.matrix() * h.matrix())?
        }
        TargetKind::Geometric => geometric_mean(&exp_h(&x.scale(2.0))?, &exp_h(&y.scale(2.0))?, 0.5)?,
        TargetKind::Spectral => spectral_mean(&exp_h(&x.scale(2.0))?, &exp_h(&y.scale(2.0))?, 0.5)?,
    };
    log_spd(&arg)
}

#[derive(Clone, Debug)]
pub struct OrbitProblem {
    pub x: HermitianMatrix,
    pub y: HermitianMatrix,
    pub kind: TargetKind,
    pub z: HermitianMatrix,
}

impl OrbitProblem {
    /// Builds the target and checks the necessary condition `tr Z = tr X + tr Y`.
    pub fn new(x: HermitianMatrix, y: HermitianMatrix, kind: TargetKind) -> Result<Self> {
        let z = build_target(&x, &y, kind)?;
        let expected = x.trace() + y.trace();
        let found = z.trace();
        let scale = 1.0 + max_norm(x.matrix()) + max_norm(y.matrix());
        if (expected - found).abs() > 1e-10 * scale * x.dim() as f64 {
            return Err(Error::TraceMismatch { expected, found });
        }
        Ok(Self { x, y, kind, z })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// `R = UXU* + VYV* − Z`.
    pub fn residual_matrix(&self, u: &UnitaryMatrix, v: &UnitaryMatrix) -> CMat {
        u.conjugate(self.x.matrix()) + v.conjugate(self.y.matrix()) - self.z.matrix()
    }

    /// `‖UXU* + VYV* − Z‖_max`.
    pub fn residual(&self, u: &UnitaryMatrix, v: &UnitaryMatrix) -> f64 {
        max_norm(&self.residual_matrix(u, v))
    }
}

/// `½‖UXU* + VYV* − Z‖²_F`.
pub fn objective(u: &UnitaryMatrix, v: &UnitaryMatrix, prob: &OrbitProblem) -> f64 {
    0.5 * frobenius(&prob.residual_matrix(u, v)).powi(2)
}

fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// `(K_U, K_V) = ([R, A], [R, B])`.
pub fn riemannian_grad(u: &UnitaryMatrix, v: &UnitaryMatrix, prob: &OrbitProblem) -> (CMat, CMat) {
    let a = u.conjugate(prob.x.matrix());
    let b = v.conjugate(prob.y.matrix());
    let r = &a + &b - prob.z.matrix();
    (commutator(&r, &a), commutator(&r, &b))
}

/// `⟨K, G⟩_F = Re tr(K* G)`.
pub fn frobenius_inner(k: &CMat, g: &CMat) -> f64 {
    k.iter().zip(g.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Iteration cap per start.
    pub max_iter: usize,
    /// Target for `‖R‖_max`.
    pub tol: f64,
    pub seed: u64,
    pub max_restarts: usize,
    pub realization: Realization,
    /// Steepest-descent iterations per run before switching to Levenberg–Marquardt
    /// directions (`usize::MAX` keeps pure steepest descent).
    pub gradient_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 200_000,
            tol: ORBIT_TOL,
            seed: 0,
            max_restarts: 4,
            realization: Realization::Glc,
            gradient_iters: 1000,
        }
    }
}

const ETA0: f64 = 1.0;
const BACKTRACK: f64 = 0.5;
const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const STALL_REL_DECREASE: f64 = 1e-14;
const STALL_WINDOW: usize = 50;

#[derive(Clone, Debug)]
pub struct OrbitSolution {
    pub u: UnitaryMatrix,
    pub v: UnitaryMatrix,
    /// `‖UXU* + VYV* − Z‖_max` at `(u, v)`.
    pub residual: f64,
    /// Iterations of the run that produced `(u, v)`.
    pub iterations: usize,
    /// Objective values of that run, starting with the initial point.
    pub objective_trace: Vec<f64>,
    /// Number of restarts before that run.
    pub restarts: usize,
}

enum RunEnd {
    Converged,
    Stalled,
    Capped,
}

struct SkewStep {
    exp: SkewExp,
    real: bool,
}

impl SkewStep {
    fn new(k: &CMat, real: bool) -> Result<Self> {
        Ok(Self {
            exp: SkewExp::new(k)?,
            real,
        })
    }

    fn at(&self, eta: f64) -> CMat {
        let m = self.exp.at(eta).into_inner();
        if self.real {
            m.map(|z| c(z.re, 0.0))
        } else {
            m
        }
    }
}

fn run(prob: &OrbitProblem, u0: UnitaryMatrix, v0: UnitaryMatrix, cfg: &SolverConfig) -> Result<(OrbitSolution, RunEnd)> {
    let real = cfg.realization == Realization::Slr;
    let (mut u, mut v) = (u0, v0);
    let mut f = objective(&u, &v, prob);
    let mut trace = vec![f];
    let mut stall = 0;
    let mut iterations = 0;
    let end = loop {
        if prob.residual(&u, &v) <= cfg.tol {
            break RunEnd::Converged;
        }
        if iterations >= cfg.max_iter {
            break RunEnd::Capped;
        }
        iterations += 1;
        let (ku, kv) = riemannian_grad(&u, &v, prob);
        // steps are U ← e^{−ηD_U} U, so the slope along η is −⟨D_U, K_U⟩ − ⟨D_V, K_V⟩
        let (du, dv) = if iterations > cfg.gradient_iters {
            levenberg_marquardt_direction(&u, &v, prob, real)?
        } else {
            (ku.clone(), kv.clone())
        };
        let decrease = frobenius_inner(&du, &ku) + frobenius_inner(&dv, &kv);
        let (du, dv, decrease) = if decrease > 0.0 {
            (du, dv, decrease)
        } else {
            let g2 = frobenius(&ku).powi(2) + frobenius(&kv).powi(2);
            (ku, kv, g2)
        };
        let su = SkewStep::new(&du, real)?;
        let sv = SkewStep::new(&dv, real)?;
        let mut eta = ETA0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let un = UnitaryMatrix::new_unchecked(su.at(eta) * u.matrix());
            let vn = UnitaryMatrix::new_unchecked(sv.at(eta) * v.matrix());
            let fn_ = objective(&un, &vn, prob);
            if fn_ <= f - ARMIJO_C * eta * decrease {
                accepted = Some((un, vn, fn_));
                break;
            }
            eta *= BACKTRACK;
        }
        let f_new = match accepted {
            Some((un, vn, fn_)) => {
                u = un;
                v = vn;
                fn_
            }
            None => f,
        };
        if f - f_new < STALL_REL_DECREASE * f {
            stall += 1;
        } else {
            stall = 0;
        }
        f = f_new;
        trace.push(f);
        if stall >= STALL_WINDOW {
            break RunEnd::Stalled;
        }
    };
    let residual = prob.residual(&u, &v);
    Ok((
        OrbitSolution {
            u,
            v,
            residual,
            iterations,
            objective_trace: trace,
            restarts: 0,
        },
        end,
    ))
}

/// Real basis of the skew-Hermitian (or, for real data, skew-symmetric) matrices.
fn skew_basis(n: usize, real: bool) -> Vec<CMat> {
    let mut basis = Vec::new();
    let unit = |i: usize, j: usize, z| {
        let mut m = CMat::zeros(n, n);
        m[(i, j)] = z;
        m
    };
    for i in 0..n {
        for j in i + 1..n {
            basis.push(unit(i, j, c(1.0, 0.0)) - unit(j, i, c(1.0, 0.0)));
            if !real {
                basis.push(unit(i, j, c(0.0, 1.0)) + unit(j, i, c(0.0, 1.0)));
            }
        }
        if !real {
            basis.push(unit(i, i, c(0.0, 1.0)));
        }
    }
    basis
}

fn real_vec(m: &CMat) -> impl Iterator<Item = f64> + '_ {
    m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im))
}

/// Descent pair `(D_U, D_V)` from `min ‖R + [K, A] + [L, B]‖² + ‖R‖_F (‖K‖² + ‖L‖²)`,
/// with `D = −K`, `−L`.
fn levenberg_marquardt_direction(u: &UnitaryMatrix, v: &UnitaryMatrix, prob: &OrbitProblem, real: bool) -> Result<(CMat, CMat)> {
    let n = prob.dim();
    let a = u.conjugate(prob.x.matrix());
    let b = v.conjugate(prob.y.matrix());
    let r = &a + &b - prob.z.matrix();
    let basis = skew_basis(n, real);
    let m = basis.len();
    let rows = 2 * n * n;
    let mut jac = DMatrix::<f64>::zeros(rows, 2 * m);
    for (col, k) in basis.iter().enumerate() {
        for (row, x) in real_vec(&commutator(k, &a)).enumerate() {
            jac[(row, col)] = x;
        }
        for (row, x) in real_vec(&commutator(k, &b)).enumerate() {
            jac[(row, m + col)] = x;
        }
    }
    let rv = DVector::from_iterator(rows, real_vec(&r));
    let mu = frobenius(&r);
    let mut normal = jac.transpose() * &jac;
    for i in 0..2 * m {
        normal[(i, i)] += mu;
    }
    let rhs = -(jac.transpose() * rv);
    let p = normal.cholesky().ok_or(Error::SingularInput)?.solve(&rhs);
    let mut du = CMat::zeros(n, n);
    let mut dv = CMat::zeros(n, n);
    for (i, k) in basis.iter().enumerate() {
        du -= k.scale(p[i]);
        dv -= k.scale(p[m + i]);
    }
    Ok((du, dv))
}

fn random_start(n: usize, realization: Realization, rng: &mut impl Rng) -> UnitaryMatrix {
    match realization {
        Realization::Glc => random_unitary(n, rng),
        Realization::Slr => random_orthogonal(n, rng),
    }
}

/// Runs from `U = V = I`, then from up to `max_restarts` seeded random starts while
/// runs stall. Returns `MaxIterReached` with the best iterate when no run converges.
pub fn solve(prob: &OrbitProblem, cfg: &SolverConfig) -> Result<OrbitSolution> {
    let n = prob.dim();
    let mut rng = rng_from_seed(cfg.seed);
    let mut best: Option<OrbitSolution> = None;
    for attempt in 0..=cfg.max_restarts {
        let (u0, v0) = if attempt == 0 {
            (UnitaryMatrix::identity(n), UnitaryMatrix::identity(n))
        } else {
            let u0 = random_start(n, cfg.realization, &mut rng);
            (u0, random_start(n, cfg.realization, &mut rng))
        };
        let (mut sol, end) = run(prob, u0, v0, cfg)?;
        sol.restarts = attempt;
        match end {
            RunEnd::Converged => return Ok(sol),
            RunEnd::Capped | RunEnd::Stalled => {
                if best.as_ref().is_none_or(|b| sol.residual < b.residual) {
                    best = Some(sol);
                }
                if matches!(end, RunEnd::Capped) {
                    break;
                }
            }
        }
    }
    Err(Error::MaxIterReached(Box::new(best.expect("at least one run"))))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipReport {
    pub residual: f64,
    /// `max_i |λ_i(UXU*) − λ_i(X)|`
    pub eig_dev_x: f64,
    /// `max_i |λ_i(VYV*) − λ_i(Y)|`
    pub eig_dev_y: f64,
    pub unitary_defect: f64,
    /// Largest `|Im|` of an entry of `U` or `V` (zero expected in the real realization).
    pub imag_part: f64,
    pub det_u: f64,
    pub det_v: f64,
}

impl MembershipReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual <= tol
            && self.eig_dev_x <= ORBIT_EIG_TOL
            && self.eig_dev_y <= ORBIT_EIG_TOL
            && self.unitary_defect <= UNITARY_TOL
    }

    /// Real orthogonal factors with determinant `+1`.
    pub fn in_special_orthogonal(&self) -> bool {
        self.imag_part == 0.0 && (self.det_u - 1.0).abs() <= UNITARY_TOL && (self.det_v - 1.0).abs() <= UNITARY_TOL
    }
}

fn eig_deviation(conj: &CMat, orig: &HermitianMatrix) -> Result<f64> {
    let a = HermitianMatrix::symmetrized(conj).eigenvalues()?;
    let b = orig.eigenvalues()?;
    let scale = 1.0_f64.max(b.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    Ok(a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale)
}

/// Recomputes everything about a claimed solution from scratch.
pub fn membership_report(u: &UnitaryMatrix, v: &UnitaryMatrix, prob: &OrbitProblem) -> Result<MembershipReport> {
    let imag = u.matrix().iter().chain(v.matrix().iter()).fold(0.0_f64, |m, z| m.max(z.im.abs()));
    Ok(MembershipReport {
        residual: prob.residual(u, v),
        eig_dev_x: eig_deviation(&(u.matrix() * prob.x.matrix() * u.matrix().adjoint()), &prob.x)?,
        eig_dev_y: eig_deviation(&(v.matrix() * prob.y.matrix() * v.matrix().adjoint()), &prob.y)?,
        unitary_defect: u.defect().max(v.defect()),
        imag_part: imag,
        det_u: crate::linalg::det(u.matrix()).re,
        det_v: crate::linalg::det(v.matrix()).re,
    })
}

/// `UXU* + VYV* = Z` to `ORBIT_TOL`, with both conjugated factors keeping their
/// spectra to `ORBIT_EIG_TOL`.
pub fn verify_membership(sol: &OrbitSolution, prob: &OrbitProblem) -> bool {
    membership_report(&sol.u, &sol.v, prob).is_ok_and(|r| r.holds(ORBIT_TOL))
}

/// True when every entry is at most the previous one.
pub fn is_non_increasing(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] <= w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{diag, identity, rel_diff};
    use crate::random::{random_hermitian_with, Field};

    fn problem(seed: u64, n: usize, kind: TargetKind) -> OrbitProblem {
        let mut rng = rng_from_seed(seed);
        let x = random_hermitian_with(n, 1.0, Field::Complex, &mut rng).unwrap();
        let y = random_hermitian_with(n, 1.0, Field::Complex, &mut rng).unwrap();
        OrbitProblem::new(x, y, kind).unwrap()
    }

    #[test]
    fn targets_in_trivial_cases() {
        let x = HermitianMatrix::new(diag(&[0.3, -0.7])).unwrap();
        let y = HermitianMatrix::new(diag(&[1.1, 0.2])).unwrap();
        let z = build_target(&x, &y, TargetKind::ExpProduct).unwrap();
        assert!(rel_diff(z.matrix(), &(x.matrix() + y.matrix())) < 1e-13);
        let p = problem(3, 3, TargetKind::Geometric);
        let zero = HermitianMatrix::zeros(3);
        for kind in TargetKind::ALL {
            let z = build_target(&zero, &p.y, kind).unwrap();
            assert!(rel_diff(z.matrix(), p.y.matrix()) < 1e-12, "{kind:?}");
        }
        let z = build_target(&p.x, &p.x, TargetKind::Geometric).unwrap();
        assert!(rel_diff(z.matrix(), p.x.scale(2.0).matrix()) < 1e-12);
    }

    #[test]
    fn trace_condition_holds_for_targets() {
        for seed in 0..30 {
            for kind in TargetKind::ALL {
                let p = problem(seed, 2 + seed as usize % 5, kind);
                assert!((p.z.trace() - p.x.trace() - p.y.trace()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn objective_two_ways() {
        let p = problem(11, 4, TargetKind::Spectral);
        let mut rng = rng_from_seed(1);
        let (u, v) = (random_unitary(4, &mut rng), random_unitary(4, &mut rng));
        let r = p.residual_matrix(&u, &v);
        let trace_form = 0.5 * (r.adjoint() * &r).trace().re;
        assert!((objective(&u, &v, &p) - trace_form).abs() <= 1e-12 * trace_form.max(1.0));
        let zero = HermitianMatrix::zeros(3);
        let q = OrbitProblem::new(zero.clone(), zero, TargetKind::ExpProduct).unwrap();
        assert_eq!(objective(&random_unitary(3, &mut rng), &random_unitary(3, &mut rng), &q), 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(77);
        let eps = 1e-6;
        for trial in 0..30 {
            let n = 2 + trial % 5;
            let p = problem(1000 + trial as u64, n, TargetKind::ALL[trial % 3]);
            let (u, v) = (random_unitary(n, &mut rng), random_unitary(n, &mut rng));
            let h = crate::random::random_hermitian_with(n, 1.0, Field::Complex, &mut rng).unwrap();
            let k = h.matrix().map(|z| z * c(0.0, 1.0));
            let (ku, kv) = riemannian_grad(&u, &v, &p);
            let f0 = objective(&u, &v, &p);
            let step = SkewExp::new(&k).unwrap().at(-eps);
            let fu = objective(&UnitaryMatrix::new_unchecked(step.matrix() * u.matrix()), &v, &p);
            let fv = objective(&u, &UnitaryMatrix::new_unchecked(step.matrix() * v.matrix()), &p);
            for (fd, g) in [((fu - f0) / eps, &ku), ((fv - f0) / eps, &kv)] {
                let exact = frobenius_inner(&k, g);
                assert!((fd - exact).abs() <= 1e-4 * exact.abs().max(1e-3), "trial {trial}: {fd} vs {exact}");
            }
            assert!(rel_diff(&ku, &(-ku.adjoint())) < 1e-14);
        }
    }

    #[test]
    fn gradient_vanishes_at_solution_and_for_commuting_data() {
        let x = HermitianMatrix::new(diag(&[0.3, -0.7, 0.1])).unwrap();
        let y = HermitianMatrix::new(diag(&[1.1, 0.2, -0.4])).unwrap();
        let p = OrbitProblem::new(x, y, TargetKind::ExpProduct).unwrap();
        let id = UnitaryMatrix::identity(3);
        let (ku, kv) = riemannian_grad(&id, &id, &p);
        assert!(max_norm(&ku) < 1e-14 && max_norm(&kv) < 1e-14);
        let sol = solve(&p, &SolverConfig::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.restarts, 0);
        assert!(max_norm(&(sol.u.matrix() - identity(3))) == 0.0);
    }

    #[test]
    fn solves_small_instances() {
        for seed in 0..10 {
            for kind in TargetKind::ALL {
                let p = problem(seed, 2, kind);
                let cfg = SolverConfig {
                    seed,
                    ..SolverConfig::default()
                };
                let sol = solve(&p, &cfg).unwrap();
                assert!(sol.residual <= 1e-8);
                assert!(is_non_increasing(&sol.objective_trace));
                assert!(verify_membership(&sol, &p));
            }
        }
    }

    #[test]
    fn perturbed_solution_is_rejected() {
        let p = problem(5, 3, TargetKind::Geometric);
        let mut sol = solve(&p, &SolverConfig::default()).unwrap();
        assert!(verify_membership(&sol, &p));
        let mut u = sol.u.clone().into_inner();
        u[(0, 0)] *= c(1.001, 0.0);
        sol.u = UnitaryMatrix::new_unchecked(u);
        assert!(!verify_membership(&sol, &p));
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let p = problem(8, 5, TargetKind::Spectral);
        let cfg = SolverConfig {
            max_iter: 3,
            ..SolverConfig::default()
        };
        match solve(&p, &cfg) {
            Err(Error::MaxIterReached(best)) => {
                assert_eq!(best.iterations, 3);
                assert!(best.residual > 1e-8);
                assert!(best.objective_trace.len() == 4);
            }
            other => panic!("expected MaxIterReached, got {other:?}"),
        }
    }
}
