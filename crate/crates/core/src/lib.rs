//! Time-and-band limiting for a family of 2x2 matrix-valued Jacobi-type
//! weights, built around a commuting tridiagonal operator.
//!
//! # The problem
//!
//! Fix exponents `alpha, beta > -1`, a truncation degree `N`, and a band
//! edge `omega` in `(-1, 1]`. The weight
//!
//! ```text
//! W(x) = ((w_ab + w_ba) Id + (w_ba - w_ab) T) / 2,
//! w_ab(x) = (1 - x)^alpha (1 + x)^beta,   T = [[0, 1], [1, 0]]
//! ```
//!
//! carries a family of 2x2 matrix polynomials `P_n`, orthogonal on `(-1, 1)`,
//! with orthonormal version `Q_n`. "Time limiting" truncates expansions at
//! degree `N`; "band limiting" restricts integration to `(-1, omega)`. The
//! composition of the two is represented by the Gram matrix
//! `M[m, k] = integral over (-1, omega) of Q_m W Q_k^T`, whose eigenvalues
//! crowd exponentially close to 0 and 1 — directly diagonalizing `M` is
//! numerically hopeless.
//!
//! # The method
//!
//! There is a second-order differential operator, depending on `omega` and
//! `N`, whose coefficient matrix `L` in the `Q_n` basis is block tridiagonal,
//! symmetric, and **commutes with `M`** exactly. `L` has well-separated
//! eigenvalues, so diagonalizing `L` recovers the shared eigenvectors
//! stably; the concentrations `lambda` are then read off `M` as Rayleigh
//! quotients. Every block of both matrices commutes with the exchange matrix
//! `T`, which splits the whole problem into two independent scalar sectors.
//!
//! # Layout
//!
//! - [`jacobi`]: scalar Jacobi polynomials, norms, derivative shifts.
//! - [`mat2`]: a minimal fixed-size 2x2 matrix type and the exchange algebra.
//! - [`params`]: validated parameter bundle ([`ModelParams`]).
//! - [`matpoly`]: the matrix weight and polynomial family with its
//!   structural constants and differential identities.
//! - [`quadrature`]: Gauss rules for weights `(1-x)^a (1+x)^b` on mapped
//!   intervals.
//! - [`gram`]: the split quadrature rules for `(-1, omega)` and the Gram
//!   matrix `M`.
//! - [`block`]: dense block matrices with 2x2 blocks.
//! - [`operators`]: the commuting operator, its tridiagonal coefficient
//!   matrix, the reproducing kernel, and commutator diagnostics.
//! - [`spectral`]: sector decomposition, symmetric eigensolvers, matched
//!   eigenpairs, and spectrum reports.
//! - [`verify`]: the named residual-check battery behind `timeband verify`.
//! - [`samples`]: deterministic evaluation grids.

pub mod block;
pub mod error;
pub mod gram;
pub mod jacobi;
pub mod mat2;
pub mod matpoly;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod samples;
pub mod spectral;
pub mod verify;

pub use block::BlockMatrix;
pub use error::Error;
pub use gram::{convergence_check, gram_m, gram_with_order, ConvergenceReport, WeightedRules};
pub use mat2::{Matrix2, T};
pub use matpoly::{
    apply_d, cd_residual, cd_scale, check_first_order_ode, poly_p, poly_q, struct_constants,
    weight_p, weight_p_deriv, weight_w, MatPoly, StructConstants,
};
pub use operators::{
    apply_band_restriction, apply_commuting_op, commutator_residual, commuting_matrix,
    commuting_matrix_by_projection, commuting_matrix_exchange_variant, commuting_op_coeffs,
    coupling_mu, exchange_block_matrix, kernel, kernel_intertwining_cross_residual,
    kernel_intertwining_residual, CommutingOpCoeffs,
};
pub use params::ModelParams;
pub use quadrature::QuadratureRule;
pub use samples::{
    chebyshev_points, default_sample_points, sample_pairs, seeded_points, DEFAULT_SEED,
};
pub use spectral::{
    eig_sym, eig_sym_tridiag, eigenfunction_integral_residuals, eigenfunction_sample,
    eigenpairs_from, prolate_eigenpairs, sector_decompose, sector_reassemble, spectrum_report,
    EigenDecomposition, ProlatePair, SectorPair, SectorSpectrum, SpectrumReport,
};
pub use verify::{
    verify_exit_code, verify_instance, verify_with_operators, CheckResult, VerifyReport,
};
