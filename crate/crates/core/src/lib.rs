//! Majorization and power majorization between the root vectors of
//! hyperbolic polynomials that factor as `∏ (t² − 2uᵢt + 1)`.
//!
//! If `v ≺ u` (with all entries `≥ 1`), the roots `y` of the `v`-polynomial
//! are power majorized by the roots `x` of the `u`-polynomial, even though
//! `y ≺ x` can fail. This crate provides the pieces needed to check that
//! numerically:
//!
//! - [`vectors`]: the partial-sum majorization test and instance generator
//! - [`polyfact`]: expansion, closed-form roots, and factor recovery
//! - [`powermaj`]: power sums and the grid-based power-majorization verdict
//! - [`schur`]: the Schur-convexity functions and their sign checks
//! - [`linalg`]: Gram matrices, characteristic polynomials, Jacobi
//!   eigenvalues, and the bundled 4×4 example

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod polyfact;
pub mod powermaj;
pub mod schur;
pub mod vectors;

pub use error::{Error, Result};
pub use linalg::{
    char_poly, gram, klemes_example, klemes_example_with_tol, klemes_matrices, sym_eigenvalues,
    DenseMatrix, ExampleBundle, SymmetricMatrix,
};
pub use polyfact::{
    evaluate, expand, recover_factorization, roots, PolynomialCoefficients, QuadraticFactorization,
};
pub use powermaj::{
    default_grid, margin, power_majorizes, power_sum, ExponentGrid, PowerMajorizationReport,
};
pub use schur::{ProofSuiteReport, SchurCheckReport};
pub use vectors::{
    hlp_check, majorizes, random_majorization_pair, random_majorization_pair_with, sort_descending,
    EntryRange, MajorizationReport, RealVector, DEFAULT_TOL,
};
