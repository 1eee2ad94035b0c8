//! Seeded batch verification suites.
//!
//! Every suite turns `trials` seeded instances into report rows
//! `seed, n, t, predicate, pass, worst_margin`. A row passes when its property holds
//! within the tolerance attached to it; `worst_margin` is signed slack (negative
//! means violated, modulo the tolerance). Trials run in parallel and rows are
//! emitted in trial order, so a fixed configuration always yields the same report.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gtchain::{
    chain_verdicts, default_grid, eigenvalue_log_majorization, golden_thompson_refinement, psi,
    psi_spectrum_via_conjugation, scan_chain, ChainVerdicts, CHAIN_SPREAD,
};
use crate::kostant::{check_group_chain, sharp_below_natural};
use crate::linalg::funcs::SkewExp;
use crate::linalg::matrix::{c, CMat, UnitaryMatrix};
use crate::majorization::{check_compound_mean_identities, compound_spd, log_majorization_means_report};
use crate::means::{mean_identity_suite, MeanParams};
use crate::orbit::{
    frobenius_inner, is_non_increasing, membership_report, objective, riemannian_grad, solve, OrbitProblem,
    OrbitSolution, SolverConfig, TargetKind,
};
use crate::random::{random_orthogonal, random_unitary, rng_from_seed, InstanceRng, DEFAULT_SPREAD};
use crate::realization::Realization;
use crate::tol::{IDENTITY_TOL, ORBIT_EIG_TOL, ORBIT_TOL};

/// Version line written at the top of every CSV report.
pub const SCHEMA_LINE: &str = "# geomeans verify report, schema v1";
pub const CSV_HEADER: &str = "seed,n,t,predicate,pass,worst_margin";

/// Grid for the interpolation parameter of the mean suites.
pub const T_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// Grid for the reparameterization offsets; `r + s ≤ 1` holds on all pairs.
pub const RS_GRID: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
/// `t ∈ {0, 0.1, …, 1}`.
pub fn tenths() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

/// Relative tolerance of the finite-difference gradient check.
pub const GRAD_FD_TOL: f64 = 1e-4;
pub const GRAD_FD_EPS: f64 = 1e-6;
/// Relative tolerance for compound identities and the top compound eigenvalue.
pub const COMPOUND_TOL: f64 = 1e-10;
/// Relative tolerance for `det(A ♯_t B) = det(A ♮_t B)`.
pub const DET_TOL: f64 = 1e-10;
/// Relative tolerance for the two routes to the spectrum of `ψ(r)`.
pub const PSI_SPECTRUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Means,
    Logmaj,
    Compound,
    Chain,
    Kostant,
    Orbit,
    Grad,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Means,
        Suite::Logmaj,
        Suite::Compound,
        Suite::Chain,
        Suite::Kostant,
        Suite::Orbit,
        Suite::Grad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Means => "means",
            Suite::Logmaj => "logmaj",
            Suite::Compound => "compound",
            Suite::Chain => "chain",
            Suite::Kostant => "kostant",
            Suite::Orbit => "orbit",
            Suite::Grad => "grad",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    fn salt(self) -> u64 {
        0x9e37_79b9_7f4a_7c15u64.wrapping_mul(self as u64 + 1)
    }

    fn default_n(self, trial: usize) -> usize {
        match self {
            Suite::Means | Suite::Logmaj => 2 + trial % 7,
            Suite::Compound => 4,
            Suite::Chain | Suite::Kostant | Suite::Grad => 2 + trial % 5,
            Suite::Orbit => 2 + (trial / 3) % 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    /// Fixed dimension; each suite cycles through its own range when unset.
    pub n: Option<usize>,
    pub realization: Realization,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 20,
            n: None,
            realization: Realization::Glc,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub seed: u64,
    pub n: usize,
    pub t: Option<f64>,
    pub predicate: String,
    pub pass: bool,
    pub margin: f64,
}

impl Row {
    fn new(inst: &Instance, t: Option<f64>, predicate: impl Into<String>, pass: bool, margin: f64) -> Self {
        Row {
            seed: inst.seed,
            n: inst.n,
            t,
            predicate: predicate.into(),
            pass,
            margin,
        }
    }

    /// Passes when `value ≤ tol`; the margin is `tol − value`.
    fn below(inst: &Instance, t: Option<f64>, predicate: impl Into<String>, value: f64, tol: f64) -> Self {
        Row::new(inst, t, predicate, value <= tol, tol - value)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<Row>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(SCHEMA_LINE);
        out.push('\n');
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let t = r.t.map(|t| format!("{t}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6e}",
                r.seed,
                r.n,
                t,
                r.predicate,
                if r.pass { "pass" } else { "fail" },
                r.margin
            );
        }
        out
    }
}

/// One seeded trial.
struct Instance {
    seed: u64,
    trial: usize,
    n: usize,
    realization: Realization,
    rng: InstanceRng,
}

impl Instance {
    fn new(suite: Suite, cfg: &VerifyConfig, trial: usize) -> Self {
        let seed = cfg.seed.wrapping_add(trial as u64);
        Instance {
            seed,
            trial,
            n: cfg.n.unwrap_or_else(|| suite.default_n(trial)),
            realization: cfg.realization,
            rng: rng_from_seed(seed ^ suite.salt()),
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.n == Some(0) || cfg.n.is_some_and(|n| n > 64) {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: cfg.n.unwrap_or(0) as f64,
        });
    }
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut inst = Instance::new(suite, cfg, trial);
            match suite {
                Suite::Means => means_trial(&mut inst),
                Suite::Logmaj => logmaj_trial(&mut inst),
                Suite::Compound => compound_trial(&mut inst),
                Suite::Chain => chain_trial(&mut inst),
                Suite::Kostant => kostant_trial(&mut inst),
                Suite::Orbit => orbit_trial(&mut inst),
                Suite::Grad => grad_trial(&mut inst),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        rows: per_trial.into_iter().flatten().collect(),
    })
}

/// Runs several suites in the given order into one report.
pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut rows = Vec::new();
    for &s in suites {
        rows.extend(run_suite(s, cfg)?.rows);
    }
    Ok(VerifyReport { rows })
}

fn means_trial(inst: &mut Instance) -> Result<Vec<Row>> {
    let a = inst.realization.random_positive(inst.n, DEFAULT_SPREAD, &mut inst.rng)?;
    let b = inst.realization.random_positive(inst.n, DEFAULT_SPREAD, &mut inst.rng)?;
    let k = inst.trial % 125;
    let p = MeanParams::new(T_GRID[k / 25], RS_GRID[(k / 5) % 5], RS_GRID[k % 5])?;
    let rep = mean_identity_suite(&a, &b, p)?;
    Ok(rep
        .residuals
        .iter()
        .map(|r| Row::below(inst, Some(p.t), format!("means.{}", r.name), r.residual, IDENTITY_TOL))
        .collect())
}

fn logmaj_trial(inst: &mut Instance) -> Result<Vec<Row>> {
    let a = inst.realization.random_positive(inst.n, DEFAULT_SPREAD, &mut inst.rng)?;
    let b = inst.realization.random_positive(inst.n, DEFAULT_SPREAD, &mut inst.rng)?;
    let mut rows = Vec::new();
    for t in tenths() {
        let rep = log_majorization_means_report(&a, &b, t)?;
        rows.push(Row::new(
            inst,
            Some(t),
            "logmaj.sharp_below_natural",
            rep.verdict.is_pass(),
            rep.check.margin,
        ));
        let dg: f64 = rep.sharp_eigenvalues.iter().product();
        let dn: f64 = rep.natural_eigenvalues.iter().product();
        let rel = (dg - dn).abs() / dg.abs().max(dn.abs());
        rows.push(Row::below(inst, Some(t), "logmaj.det", rel, DET_TOL));
    }
    Ok(rows)
}

fn compound_trial(inst: &mut Instance) -> Result<Vec<Row>> {
    let a = inst.realization.random_positive(inst.n, DEFAULT_SPREAD, &mut inst.rng)?;
    let b = inst.realization.random_positive(inst.n, DEFAULT_SPREAD, &mut inst.rng)?;
    let t = tenths()[inst.trial % 11];
    let ev = a.eigenvalues()?;
    let mut rows = Vec::new();
    for k in [2usize, 3].into_iter().filter(|&k| k <= inst.n) {
        let rep = check_compound_mean_identities(&a, &b, t, k)?;
        rows.push(Row::below(inst, Some(t), format!("compound.k{k}.sharp"), rep.sharp_residual, COMPOUND_TOL));
        rows.push(Row::below(inst, Some(t), format!("compound.k{k}.natural"), rep.natural_residual, COMPOUND_TOL));
        let top = compound_spd(&a, k)?.eigenvalues()?[0];
        let prod: f64 = ev[..k].iter().product();
        rows.push(Row::below(
            inst,
            Some(t),
            format!("compound.k{k}.top_eigenvalue"),
            (top - prod).abs() / prod,
            COMPOUND_TOL,
        ));
    }
    Ok(rows)
}

/// One row per predicate name: passes when it passes at every grid point, with the
/// smallest margin over the grid. Names keep first-appearance order.
fn aggregate(inst: &Instance, prefix: &str, v: &ChainVerdicts) -> Vec<Row> {
    let mut rows: Vec<Row> = Vec::new();
    for p in &v.predicates {
        let name = format!("{prefix}.{}", p.name);
        match rows.iter_mut().find(|r| r.predicate == name) {
            Some(r) => {
                r.pass &= p.verdict.is_pass();
                r.margin = r.margin.min(p.margin);
            }
            None => rows.push(Row::new(inst, None, name, p.verdict.is_pass(), p.margin)),
        }
    }
    rows
}

fn chain_pair(inst: &mut Instance) -> Result<(crate::HermitianMatrix, crate::HermitianMatrix)> {
    let x = inst.realization.random_generator(inst.n, CHAIN_SPREAD, &mut inst.rng)?;
    let y = inst.realization.random_generator(inst.n, CHAIN_SPREAD, &mut inst.rng)?;
    Ok((x, y))
}

fn chain_trial(inst: &mut Instance) -> Result<Vec<Row>> {
    let (x, y) = chain_pair(inst)?;
    let scan = scan_chain(&x, &y, &default_grid())?;
    let mut rows = aggregate(inst, "chain", &chain_verdicts(&scan, &eigenvalue_log_majorization)?);
    let mut worst = 0.0_f64;
    for r in [0.25, 1.0, 2.0] {
        let a = psi(&x, &y, r)?.eigenvalues()?;
        let b = psi_spectrum_via_conjugation(&x, &y, r)?;
        for (u, w) in a.iter().zip(&b) {
            worst = worst.max((u - w).abs() / w.abs());
        }
    }
    rows.push(Row::below(inst, None, "chain.psi_spectrum_conjugation", worst, PSI_SPECTRUM_TOL));
    for r in [1.0, 0.5] {
        let g = golden_thompson_refinement(&x, &y, r)?;
        let margin = (g.trace_psi - g.trace_exp_sum).min(g.trace_product - g.trace_psi);
        rows.push(Row::new(inst, None, format!("chain.golden_thompson_refinement.r{r}"), g.holds(), margin));
    }
    Ok(rows)
}

fn kostant_trial(inst: &mut Instance) -> Result<Vec<Row>> {
    let (x, y) = chain_pair(inst)?;
    let rep = check_group_chain(&x, &y, &default_grid())?;
    let mut rows = aggregate(inst, "kostant", &rep.kostant);
    rows.push(Row::new(inst, None, "kostant.agrees_with_log_majorization", rep.comparators_agree(), 0.0));
    let p = inst.realization.random_positive(inst.n, DEFAULT_SPREAD, &mut inst.rng)?;
    let q = inst.realization.random_positive(inst.n, DEFAULT_SPREAD, &mut inst.rng)?;
    let t = tenths()[inst.trial % 11];
    let chk = sharp_below_natural(&p, &q, t)?;
    rows.push(Row::new(inst, Some(t), "kostant.sharp_below_natural", chk.holds, chk.margin));
    Ok(rows)
}

/// Spectrum half-width of orbit-problem generators.
pub const ORBIT_SPREAD: f64 = 1.0;

/// The orbit problem of one trial of the orbit suite.
pub fn orbit_instance(
    kind: TargetKind,
    n: usize,
    realization: Realization,
    rng: &mut impl Rng,
) -> Result<OrbitProblem> {
    let x = realization.random_generator(n, ORBIT_SPREAD, rng)?;
    let y = realization.random_generator(n, ORBIT_SPREAD, rng)?;
    OrbitProblem::new(x, y, kind)
}

/// Per-solution report rows shared by the suite and the acceptance tests.
pub fn orbit_rows(
    prefix: &str,
    sol: &OrbitSolution,
    prob: &OrbitProblem,
    realization: Realization,
) -> Result<Vec<(String, bool, f64)>> {
    let m = membership_report(&sol.u, &sol.v, prob)?;
    let eig = m.eig_dev_x.max(m.eig_dev_y);
    let min_drop = sol
        .objective_trace
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    let mut rows = vec![
        (format!("{prefix}.residual"), m.residual <= ORBIT_TOL, ORBIT_TOL - m.residual),
        (format!("{prefix}.eigenvalues"), eig <= ORBIT_EIG_TOL, ORBIT_EIG_TOL - eig),
        (
            format!("{prefix}.objective_monotone"),
            is_non_increasing(&sol.objective_trace),
            if min_drop.is_finite() { min_drop } else { 0.0 },
        ),
        (format!("{prefix}.restarts"), sol.restarts <= 4, 4.0 - sol.restarts as f64),
    ];
    if realization == Realization::Slr {
        let det_dev = (m.det_u - 1.0).abs().max((m.det_v - 1.0).abs());
        rows.push((format!("{prefix}.special_orthogonal"), m.in_special_orthogonal(), -det_dev));
    }
    Ok(rows)
}

fn orbit_trial(inst: &mut Instance) -> Result<Vec<Row>> {
    let kind = TargetKind::ALL[inst.trial % 3];
    let prob = orbit_instance(kind, inst.n, inst.realization, &mut inst.rng)?;
    let cfg = SolverConfig {
        seed: inst.seed,
        realization: inst.realization,
        ..SolverConfig::default()
    };
    let prefix = format!("orbit.{}", kind.tag());
    let sol = match solve(&prob, &cfg) {
        Ok(s) => s,
        Err(Error::MaxIterReached(best)) => *best,
        Err(e) => return Err(e),
    };
    Ok(orbit_rows(&prefix, &sol, &prob, inst.realization)?
        .into_iter()
        .map(|(name, pass, margin)| Row::new(inst, None, name, pass, margin))
        .collect())
}

/// Relative error of the finite-difference directional derivative against
/// `⟨K, K_U⟩` and `⟨K, K_V⟩` along a random skew direction `K`.
pub fn gradient_fd_errors(
    prob: &OrbitProblem,
    realization: Realization,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    let n = prob.dim();
    let (u, v) = match realization {
        Realization::Glc => (random_unitary(n, rng), random_unitary(n, rng)),
        Realization::Slr => (random_orthogonal(n, rng), random_orthogonal(n, rng)),
    };
    let h = realization.random_generator(n, 1.0, rng)?;
    // K = iH is skew-Hermitian; in the real case use a real skew-symmetric K instead
    let k: CMat = match realization {
        Realization::Glc => h.matrix().map(|z| z * c(0.0, 1.0)),
        Realization::Slr => {
            let g = h.matrix().map(|z| c(z.re, 0.0));
            let upper = CMat::from_fn(n, n, |i, j| if i < j { g[(i, j)] } else { c(0.0, 0.0) });
            &upper - upper.transpose()
        }
    };
    let (ku, kv) = riemannian_grad(&u, &v, prob);
    let f0 = objective(&u, &v, prob);
    let step = SkewExp::new(&k)?.at(-GRAD_FD_EPS);
    let fu = objective(&UnitaryMatrix::new_unchecked(step.matrix() * u.matrix()), &v, prob);
    let fv = objective(&u, &UnitaryMatrix::new_unchecked(step.matrix() * v.matrix()), prob);
    let rel = |fd: f64, exact: f64| (fd - exact).abs() / exact.abs().max(1e-3);
    Ok((
        rel((fu - f0) / GRAD_FD_EPS, frobenius_inner(&k, &ku)),
        rel((fv - f0) / GRAD_FD_EPS, frobenius_inner(&k, &kv)),
    ))
}

fn grad_trial(inst: &mut Instance) -> Result<Vec<Row>> {
    let kind = TargetKind::ALL[inst.trial % 3];
    let prob = orbit_instance(kind, inst.n, inst.realization, &mut inst.rng)?;
    let (eu, ev) = gradient_fd_errors(&prob, inst.realization, &mut inst.rng)?;
    Ok(vec![
        Row::below(inst, None, "grad.fd.u", eu, GRAD_FD_TOL),
        Row::below(inst, None, "grad.fd.v", ev, GRAD_FD_TOL),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(realization: Realization) -> VerifyConfig {
        VerifyConfig {
            seed: 5,
            trials: 6,
            n: None,
            realization,
        }
    }

    #[test]
    fn every_suite_passes_on_both_realizations() {
        for realization in [Realization::Glc, Realization::Slr] {
            for s in Suite::ALL {
                let rep = run_suite(s, &small(realization)).unwrap();
                assert!(!rep.rows.is_empty());
                assert!(
                    rep.all_pass(),
                    "{realization:?} {s:?}: {:?}",
                    rep.failures().collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn means_rows_per_trial_are_constant() {
        let cfg = VerifyConfig {
            trials: 10,
            ..small(Realization::Glc)
        };
        let rep = run_suite(Suite::Means, &cfg).unwrap();
        assert_eq!(rep.rows.len() % 10, 0);
        let per = rep.rows.len() / 10;
        assert_eq!(rep.rows.iter().filter(|r| r.seed == 5).count(), per);
    }

    #[test]
    fn csv_is_deterministic_and_ordered() {
        let cfg = small(Realization::Glc);
        let a = run_suites(&[Suite::Logmaj, Suite::Grad], &cfg).unwrap().to_csv();
        let b = run_suites(&[Suite::Logmaj, Suite::Grad], &cfg).unwrap().to_csv();
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some(SCHEMA_LINE));
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let seeds: Vec<u64> = a
            .lines()
            .skip(2)
            .filter(|l| l.contains("logmaj.det"))
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(seeds.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn fixed_dimension_and_bad_dimension() {
        let cfg = VerifyConfig {
            n: Some(3),
            ..small(Realization::Glc)
        };
        let rep = run_suite(Suite::Compound, &cfg).unwrap();
        assert!(rep.rows.iter().all(|r| r.n == 3));
        let cfg = VerifyConfig {
            n: Some(0),
            ..small(Realization::Glc)
        };
        assert!(run_suite(Suite::Means, &cfg).is_err());
    }
}
