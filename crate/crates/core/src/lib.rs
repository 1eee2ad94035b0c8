//! Metric and spectral geometric means of positive definite matrices.
//!
//! The crate provides
//!
//! * dense complex linear algebra tuned for small matrices ([`linalg`]),
//! * the t-geometric mean `A ♯_t B` and t-spectral mean `A ♮_t B` with their identity
//!   laws ([`means`]),
//! * majorization, log-majorization and compound matrices ([`majorization`]),
//! * the Golden–Thompson complement chains `φ(r)`, `ψ(r)` ([`gtchain`]),
//! * a Riemannian solver for `UXU* + VYV* = Z` over the unitary group ([`orbit`]),
//! * the Kostant pre-order on `GL(n, ℂ)` ([`kostant`]),
//! * the real `SL(n, ℝ)/SO(n)` realization ([`realization`]),
//! * seeded batch verification suites that back the CLI ([`suites`]).

pub mod error;
pub mod gtchain;
pub mod kostant;
pub mod linalg;
pub mod majorization;
pub mod means;
pub mod orbit;
pub mod random;
pub mod realization;
pub mod suites;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianMatrix, SpdMatrix, SpectrumVector, UnitaryMatrix};
