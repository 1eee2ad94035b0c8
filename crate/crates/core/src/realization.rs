//! The two matrix realizations everything runs in.
//!
//! `GL(n, ℂ)/U(n)`: Hermitian generators, complex positive definite elements and
//! unitary conjugations. `SL(n, ℝ)/SO(n)`: real symmetric traceless generators,
//! real positive definite elements of determinant one and rotations. The real case
//! is a constraint layer over the complex kernels: instances are sampled inside the
//! real subspace and the orbit solver keeps its iterates in `SO(n)`.

use rand::Rng;

use crate::error::Result;
use crate::linalg::funcs::exp_h;
use crate::linalg::matrix::{c, max_norm, CMat, HermitianMatrix, SpdMatrix};
use crate::random::{random_hermitian_with, random_spd_with, Field};
use crate::suites::{run_suites, Suite, VerifyConfig, VerifyReport};

/// Matrix realization of the group a computation runs in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Realization {
    /// `GL(n, ℂ)` with unitary conjugations.
    #[default]
    Glc,
    /// `SL(n, ℝ)` with rotations in `SO(n)`.
    Slr,
}

impl Realization {
    pub fn field(self) -> Field {
        match self {
            Realization::Glc => Field::Complex,
            Realization::Slr => Field::Real,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Realization::Glc => "glc",
            Realization::Slr => "slr",
        }
    }

    /// A random generator: Hermitian with spectrum in `[−spread, spread]`, or its
    /// real symmetric traceless projection.
    pub fn random_generator(self, n: usize, spread: f64, rng: &mut impl Rng) -> Result<HermitianMatrix> {
        let h = random_hermitian_with(n, spread, self.field(), rng)?;
        Ok(match self {
            Realization::Glc => h,
            Realization::Slr => project_to_realization(&h).into_hermitian(),
        })
    }

    /// A random positive definite element: conjugated log-uniform spectrum, or
    /// `e^X` for a random real symmetric traceless `X` (determinant one).
    pub fn random_positive(self, n: usize, spread: f64, rng: &mut impl Rng) -> Result<SpdMatrix> {
        match self {
            Realization::Glc => random_spd_with(n, spread, Field::Complex, rng),
            Realization::Slr => exp_h(&self.random_generator(n, spread, rng)?),
        }
    }
}

/// A real symmetric traceless matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSymmetricTraceless(HermitianMatrix);

impl RealSymmetricTraceless {
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }

    /// Real entries, row-major.
    pub fn entries(&self) -> Vec<Vec<f64>> {
        let m = self.0.matrix();
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect()
    }
}

/// Real part, symmetrized, with `(tr X / n) I` removed.
pub fn project_to_realization(x: &HermitianMatrix) -> RealSymmetricTraceless {
    let n = x.dim();
    let m = x.matrix();
    let shift = (0..n).map(|i| m[(i, i)].re).sum::<f64>() / n as f64;
    let p = CMat::from_fn(n, n, |i, j| {
        let v = 0.5 * (m[(i, j)].re + m[(j, i)].re);
        c(if i == j { v - shift } else { v }, 0.0)
    });
    RealSymmetricTraceless(HermitianMatrix::symmetrized(&p))
}

/// `true` when `m` is real symmetric with trace at most `tol · ‖m‖_max`.
pub fn is_real_symmetric_traceless(m: &CMat, tol: f64) -> bool {
    let scale = max_norm(m);
    let real = m.iter().all(|z| z.im == 0.0);
    let sym = max_norm(&(m - m.transpose())) <= tol * scale;
    real && sym && m.trace().re.abs() <= tol * scale.max(f64::MIN_POSITIVE)
}

/// Every verification suite on the `SL(n, ℝ)` realization.
pub fn run_suites_on_realization(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let cfg = VerifyConfig {
        realization: Realization::Slr,
        ..cfg.clone()
    };
    run_suites(&Suite::ALL, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{diag, rel_diff};
    use crate::means::{geometric_mean, spectral_mean};
    use crate::random::rng_from_seed;

    #[test]
    fn projection_examples() {
        let x = HermitianMatrix::new(diag(&[1.0, -3.0, 2.0])).unwrap();
        let p = project_to_realization(&x);
        assert_eq!(p.as_hermitian(), &x);
        let id = HermitianMatrix::new(diag(&[1.0, 1.0])).unwrap();
        assert!(max_norm(project_to_realization(&id).as_hermitian().matrix()) == 0.0);
        let mut rng = rng_from_seed(2);
        for n in 2..7 {
            let h = random_hermitian_with(n, 2.0, Field::Complex, &mut rng).unwrap();
            let p = project_to_realization(&h);
            assert!(is_real_symmetric_traceless(p.as_hermitian().matrix(), 1e-14));
            assert_eq!(p.entries().len(), n);
        }
    }

    #[test]
    fn real_positive_elements_have_unit_determinant() {
        let mut rng = rng_from_seed(9);
        for n in 2..7 {
            let a = Realization::Slr.random_positive(n, 1.0, &mut rng).unwrap();
            let b = Realization::Slr.random_positive(n, 1.0, &mut rng).unwrap();
            assert!((a.det().unwrap() - 1.0).abs() < 1e-12);
            assert!(a.matrix().iter().all(|z| z.im == 0.0));
            for t in [0.3, 0.5] {
                let g = geometric_mean(&a, &b, t).unwrap();
                let nm = spectral_mean(&a, &b, t).unwrap();
                assert!((g.det().unwrap() - 1.0).abs() < 1e-11);
                assert!((nm.det().unwrap() - 1.0).abs() < 1e-11);
                assert!(g.matrix().iter().all(|z| z.im.abs() < 1e-14));
            }
        }
    }

    #[test]
    fn generators_match_realization() {
        let mut rng = rng_from_seed(4);
        let x = Realization::Slr.random_generator(4, 1.0, &mut rng).unwrap();
        assert!(is_real_symmetric_traceless(x.matrix(), 1e-14));
        let e = exp_h(&x).unwrap();
        assert!((e.det().unwrap() - 1.0).abs() < 1e-12);
        let h = Realization::Glc.random_generator(4, 1.0, &mut rng).unwrap();
        assert!(h.matrix().iter().any(|z| z.im != 0.0));
        assert!(rel_diff(h.matrix(), &h.matrix().adjoint()) == 0.0);
    }

    #[test]
    fn real_orbit_solution_stays_in_special_orthogonal_group() {
        use crate::orbit::{membership_report, solve, OrbitProblem, SolverConfig, TargetKind};
        for kind in TargetKind::ALL {
            let mut rng = rng_from_seed(31);
            let x = Realization::Slr.random_generator(3, 1.0, &mut rng).unwrap();
            let y = Realization::Slr.random_generator(3, 1.0, &mut rng).unwrap();
            let prob = OrbitProblem::new(x, y, kind).unwrap();
            let cfg = SolverConfig {
                realization: Realization::Slr,
                ..SolverConfig::default()
            };
            let sol = solve(&prob, &cfg).unwrap();
            let rep = membership_report(&sol.u, &sol.v, &prob).unwrap();
            assert!(rep.holds(1e-8), "{rep:?}");
            assert!(rep.in_special_orthogonal(), "{rep:?}");
        }
    }
}
