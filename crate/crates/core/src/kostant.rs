//! The Kostant pre-order on `GL(n, ℂ)`.
//!
//! For an invertible `g` the hyperbolic factor of its multiplicative Jordan
//! decomposition has the eigenvalue moduli of `g` as its spectrum, and the Weyl group
//! is the symmetric group. `f ≺ g` therefore reduces to log-majorization of the
//! eigenvalue moduli, computed here with the general (non-Hermitian) eigensolver.

use crate::error::{Error, Result};
use crate::gtchain::{chain_verdicts, eigenvalue_log_majorization, scan_chain, ChainScan, ChainVerdicts};
use crate::linalg::matrix::{require_same_dim, CMat, ComplexMatrix, HermitianMatrix, SpdMatrix};
use crate::linalg::spectrum::spectrum_general;
use crate::majorization::{log_majorization_check, MajorizationCheck};
use crate::means::{geometric_mean, spectral_mean};
use crate::tol::SPD_TOL;

/// Eigenvalue moduli of an invertible matrix, sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicSpectrum(Vec<f64>);

impl HyperbolicSpectrum {
    pub fn moduli(&self) -> &[f64] {
        &self.0
    }

    pub fn log_moduli(&self) -> Vec<f64> {
        self.0.iter().map(|m| m.ln()).collect()
    }
}

pub fn hyperbolic_spectrum(g: &ComplexMatrix) -> Result<HyperbolicSpectrum> {
    hyperbolic_spectrum_raw(g.matrix())
}

pub(crate) fn hyperbolic_spectrum_raw(g: &CMat) -> Result<HyperbolicSpectrum> {
    let mut moduli = spectrum_general(g)?.moduli();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let max = moduli[0];
    let min = *moduli.last().expect("non-empty");
    if !(min > SPD_TOL * max) {
        return Err(Error::SingularInput);
    }
    Ok(HyperbolicSpectrum(moduli))
}

/// `f ≺ g` with the partial-sum margins of the log-moduli.
pub fn kostant_check(f: &ComplexMatrix, g: &ComplexMatrix) -> Result<MajorizationCheck> {
    kostant_check_raw(f.matrix(), g.matrix())
}

fn kostant_check_raw(f: &CMat, g: &CMat) -> Result<MajorizationCheck> {
    require_same_dim(f, g)?;
    let hf = hyperbolic_spectrum_raw(f)?;
    let hg = hyperbolic_spectrum_raw(g)?;
    log_majorization_check(hf.moduli(), hg.moduli())
}

/// `f ≺ g`.
pub fn kostant_leq(f: &ComplexMatrix, g: &ComplexMatrix) -> Result<bool> {
    Ok(kostant_check(f, g)?.holds)
}

/// Comparator form of [`kostant_check`] for chain scans.
pub fn kostant_comparator(f: &SpdMatrix, g: &SpdMatrix) -> Result<MajorizationCheck> {
    kostant_check_raw(f.matrix(), g.matrix())
}

#[derive(Clone, Debug)]
pub struct GroupChainReport {
    pub scan: ChainScan,
    pub kostant: ChainVerdicts,
    pub majorization: ChainVerdicts,
}

impl GroupChainReport {
    /// Every ordering verdict of the two comparators coincides.
    pub fn comparators_agree(&self) -> bool {
        self.kostant.ordering_verdicts() == self.majorization.ordering_verdicts()
    }
}

/// Chain scan judged by the Kostant comparator, next to the eigenvalue
/// log-majorization verdicts on the same scan.
pub fn check_group_chain(x: &HermitianMatrix, y: &HermitianMatrix, r_grid: &[f64]) -> Result<GroupChainReport> {
    let scan = scan_chain(x, y, r_grid)?;
    let kostant = chain_verdicts(&scan, &kostant_comparator)?;
    let majorization = chain_verdicts(&scan, &eigenvalue_log_majorization)?;
    Ok(GroupChainReport {
        scan,
        kostant,
        majorization,
    })
}

/// `p ♯_t q ≺ p ♮_t q` in the group pre-order.
pub fn sharp_below_natural(p: &SpdMatrix, q: &SpdMatrix, t: f64) -> Result<MajorizationCheck> {
    kostant_comparator(&geometric_mean(p, q, t)?, &spectral_mean(p, q, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gtchain::{default_grid, CHAIN_SPREAD};
    use crate::linalg::matrix::{c, diag, from_real_rows};
    use crate::random::{random_hermitian_with, random_spd, random_unitary, rng_from_seed, Field};
    use rand_distr::{Distribution, StandardNormal};

    fn cm(m: CMat) -> ComplexMatrix {
        ComplexMatrix::new(m).unwrap()
    }

    fn gaussian(n: usize, rng: &mut impl rand::Rng) -> CMat {
        CMat::from_fn(n, n, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
    }

    #[test]
    fn trivial_spectra() {
        let p = random_spd(4, 3, 2.0).unwrap();
        let h = hyperbolic_spectrum(&cm(p.matrix().clone())).unwrap();
        for (a, b) in h.moduli().iter().zip(p.eigenvalues().unwrap()) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
        let u = random_unitary(5, &mut rng_from_seed(1));
        let h = hyperbolic_spectrum(&cm(u.into_inner())).unwrap();
        assert!(h.moduli().iter().all(|m| (m - 1.0).abs() < 1e-13));
        let j = from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert_eq!(hyperbolic_spectrum(&cm(j)).unwrap().moduli(), &[1.0, 1.0]);
        let s = from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(hyperbolic_spectrum(&cm(s)), Err(Error::SingularInput)));
    }

    #[test]
    fn small_orderings() {
        let f = cm(diag(&[2.0, 2.0]));
        let g = cm(diag(&[4.0, 1.0]));
        assert!(kostant_leq(&f, &g).unwrap());
        assert!(!kostant_leq(&g, &f).unwrap());
        assert!(kostant_leq(&g, &g).unwrap());
        // non-normal: eigenvalues 4 and 1 behind a large off-diagonal entry
        let t = cm(from_real_rows(&[&[4.0, 100.0], &[0.0, 1.0]]));
        assert!(kostant_leq(&t, &g).unwrap() && kostant_leq(&g, &t).unwrap());
        assert!(matches!(
            kostant_leq(&f, &cm(diag(&[1.0, 1.0, 1.0]))),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn conjugation_invariance() {
        let mut rng = rng_from_seed(21);
        for n in 2..7 {
            for _ in 0..10 {
                let g = gaussian(n, &mut rng);
                let s = gaussian(n, &mut rng);
                let s_inv = s.clone().try_inverse().unwrap();
                let a = hyperbolic_spectrum_raw(&g).unwrap();
                let b = hyperbolic_spectrum_raw(&(&s * &g * s_inv)).unwrap();
                for (x, y) in a.moduli().iter().zip(b.moduli()) {
                    assert!((x - y).abs() <= 1e-9 * x, "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn preorder_on_samples() {
        let mut rng = rng_from_seed(8);
        let mats: Vec<ComplexMatrix> = (0..12).map(|_| cm(gaussian(3, &mut rng))).collect();
        for f in &mats {
            assert!(kostant_leq(f, f).unwrap());
        }
        // scale to a common |det| so that relations can actually occur
        let normed: Vec<ComplexMatrix> = mats
            .iter()
            .map(|m| {
                let d = crate::linalg::det(m.matrix()).norm().powf(1.0 / 3.0);
                cm(m.matrix().unscale(d))
            })
            .collect();
        let mut triples = 0;
        for a in &normed {
            for b in &normed {
                for c3 in &normed {
                    if kostant_leq(a, b).unwrap() && kostant_leq(b, c3).unwrap() {
                        triples += 1;
                        assert!(kostant_leq(a, c3).unwrap());
                    }
                }
            }
        }
        assert!(triples > 12);
    }

    #[test]
    fn spd_verdicts_match_eigenvalue_log_majorization() {
        for seed in 0..60 {
            let a = random_spd(4, seed, 1.0).unwrap();
            let b = random_spd(4, seed + 500, 1.0).unwrap();
            let k = kostant_comparator(&a, &b).unwrap();
            let m = eigenvalue_log_majorization(&a, &b).unwrap();
            assert_eq!(k.holds, m.holds);
            assert!((k.margin - m.margin).abs() < 1e-11);
        }
    }

    #[test]
    fn sharp_natural_in_group_order() {
        for seed in 0..40 {
            let p = random_spd(2 + seed as usize % 5, seed, 2.0).unwrap();
            let q = random_spd(2 + seed as usize % 5, seed + 99, 2.0).unwrap();
            for t in [0.0, 0.3, 0.5, 0.9, 1.0] {
                assert!(sharp_below_natural(&p, &q, t).unwrap().holds, "seed {seed} t {t}");
            }
        }
    }

    #[test]
    fn group_chain_agrees() {
        for seed in 0..15 {
            let mut rng = rng_from_seed(seed);
            let x = random_hermitian_with(3, CHAIN_SPREAD, Field::Complex, &mut rng).unwrap();
            let y = random_hermitian_with(3, CHAIN_SPREAD, Field::Complex, &mut rng).unwrap();
            let rep = check_group_chain(&x, &y, &default_grid()).unwrap();
            assert!(rep.comparators_agree());
            assert!(rep.kostant.all_pass());
        }
        let x = HermitianMatrix::new(diag(&[0.1, 0.2])).unwrap();
        let y = HermitianMatrix::new(diag(&[-0.3, 0.1])).unwrap();
        let rep = check_group_chain(&x, &y, &[1.0]).unwrap();
        assert!(rep.comparators_agree() && rep.kostant.all_pass());
    }
}
