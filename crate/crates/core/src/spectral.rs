//! Eigenanalysis of the band-restriction Gram matrix through its commuting
//! tridiagonal partner.
//!
//! Every block of both matrices commutes with the exchange matrix `T`, so
//! conjugating each block by `U = (Id + ...)/sqrt(2) = [[1,1],[1,-1]]/sqrt(2)`
//! splits the problem into two independent scalar sectors: the `+1` sector
//! (eigenvector `(1,1)/sqrt(2)` of `T`, carrying the swapped-exponent scalar
//! weight) and the `-1` sector. Diagonalizing the Gram matrix directly is
//! numerically hopeless when its eigenvalues cluster near 0 and 1; the
//! commuting matrix has a well-spread spectrum, shares eigenvectors, and is
//! tridiagonal in each sector, so the stable route is: diagonalize the
//! commuting sector matrices, then read off each concentration `lambda` as a
//! Rayleigh quotient against the Gram sector. Near-degenerate eigenvalue
//! clusters of the commuting matrix are handled by re-diagonalizing the Gram
//! matrix on the cluster subspace instead of trusting the individual vectors.

use crate::block::BlockMatrix;
use crate::error::Error;
use crate::gram::{gram_m, WeightedRules};
use crate::mat2::Matrix2;
use crate::matpoly::poly_q;
use crate::operators::{commuting_matrix, kernel};
use crate::params::ModelParams;
use nalgebra::DMatrix;
use serde::Serialize;

/// The two scalar restrictions of an exchange-commuting block matrix.
#[derive(Debug, Clone)]
pub struct SectorPair {
    /// Restriction to the `+1` eigenspace of `T`.
    pub plus: DMatrix<f64>,
    /// Restriction to the `-1` eigenspace of `T`.
    pub minus: DMatrix<f64>,
}

/// Splits a block matrix whose blocks all commute with the exchange matrix
/// into its two scalar sectors. A block `a Id + b T` contributes `a + b` to
/// the plus sector and `a - b` to the minus sector.
///
/// # Errors
///
/// Any block with exchange-commutator norm above `1e-11 * (1 + |B|_max)` is
/// rejected: such a matrix has no sector decomposition.
pub fn sector_decompose(b: &BlockMatrix) -> Result<SectorPair, Error> {
    let order = b.order();
    let scale = 1.0 + b.max_abs();
    let mut plus = DMatrix::zeros(order, order);
    let mut minus = DMatrix::zeros(order, order);
    for m in 0..order {
        for k in 0..order {
            let blk = b.block(m, k);
            let resid = blk.exchange_commutator_norm();
            if resid > 1e-11 * scale {
                return Err(Error::NotExchangeCommuting {
                    row: m,
                    col: k,
                    residual: resid,
                });
            }
            let a = 0.5 * (blk.get(0, 0) + blk.get(1, 1));
            let t = 0.5 * (blk.get(0, 1) + blk.get(1, 0));
            plus[(m, k)] = a + t;
            minus[(m, k)] = a - t;
        }
    }
    Ok(SectorPair { plus, minus })
}

/// Inverse of [`sector_decompose`]: rebuilds the block matrix from its two
/// sectors.
pub fn sector_reassemble(pair: &SectorPair) -> BlockMatrix {
    let order = pair.plus.nrows();
    let mut out = BlockMatrix::zero(order);
    for m in 0..order {
        for k in 0..order {
            let p = pair.plus[(m, k)];
            let q = pair.minus[(m, k)];
            out.set_block(m, k, Matrix2::from_id_t(0.5 * (p + q), 0.5 * (p - q)));
        }
    }
    out
}

/// Full eigendecomposition of a real symmetric matrix: `values` ascending,
/// `vectors` columns orthonormal and matched to `values`, each column
/// oriented so its largest-magnitude entry is positive.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Symmetric eigendecomposition with input validation; the matrix must be
/// symmetric to `1e-11 * (1 + |A|_max)`.
pub fn eig_sym(a: &DMatrix<f64>) -> Result<EigenDecomposition, Error> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::DimensionMismatch(a.nrows(), a.ncols()));
    }
    let scale = 1.0 + a.amax();
    let defect = (a - a.transpose()).amax();
    if defect > 1e-11 * scale {
        return Err(Error::NotSymmetric(defect));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = nalgebra::linalg::SymmetricEigen::try_new(sym, f64::EPSILON, 200 * n.max(4))
        .ok_or(Error::EigenFailure(n))?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("symmetric eigenvalues are finite")
    });
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (out_col, &i) in idx.iter().enumerate() {
        values.push(eig.eigenvalues[i]);
        let col = eig.eigenvectors.column(i);
        let mut pivot = 0;
        for r in 0..n {
            if col[r].abs() > col[pivot].abs() {
                pivot = r;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, out_col)] = sign * col[r];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// [`eig_sym`] restricted to tridiagonal input (the shape of the commuting
/// matrix's sectors); entries outside the band are rejected rather than
/// silently folded in.
pub fn eig_sym_tridiag(a: &DMatrix<f64>) -> Result<EigenDecomposition, Error> {
    let n = a.nrows();
    let scale = 1.0 + a.amax();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && a[(i, j)].abs() > 1e-12 * scale {
                return Err(Error::NotTridiagonal);
            }
        }
    }
    eig_sym(a)
}

/// One matched eigenpair of the commuting matrix and the Gram matrix.
#[derive(Debug, Clone)]
pub struct ProlatePair {
    /// Eigenvalue of the commuting tridiagonal matrix (well-spread).
    pub chi: f64,
    /// Concentration: Rayleigh quotient of the Gram matrix on this vector;
    /// lies in (0, 1] up to roundoff.
    pub lambda: f64,
    /// Expansion of the eigenfunction in the orthonormal family: one 1x2 row
    /// per degree, `phi(x) = sum_n coeffs[n] Q_n(x)`. Unit Euclidean norm.
    pub coeffs: Vec<[f64; 2]>,
    /// Exchange-matrix eigenspace this pair lives in: `+1` or `-1`.
    pub sector: i8,
    /// Gram eigen-residual `|v M_sector - lambda v|` of the returned vector.
    pub residual: f64,
    /// True when this pair sat in a near-degenerate cluster of the commuting
    /// matrix and its vector came from re-diagonalizing the Gram matrix on
    /// the cluster subspace.
    pub flagged: bool,
    params: ModelParams,
}

impl ProlatePair {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

fn sector_unit(sector: i8) -> [f64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if sector >= 0 {
        [s, s]
    } else {
        [s, -s]
    }
}

fn sector_pairs(
    tri: &DMatrix<f64>,
    gram: &DMatrix<f64>,
    sector: i8,
    params: &ModelParams,
) -> Result<Vec<ProlatePair>, Error> {
    let n = tri.nrows();
    let eig = eig_sym_tridiag(tri)?;
    let mut vectors = eig.vectors;
    let chis = eig.values;
    let gram_norm = gram.norm();
    let residual_tol = 1e-8 * (1.0 + gram_norm);

    // Near-degenerate eigenvalues of the commuting matrix give unreliable
    // individual eigenvectors; re-diagonalize the Gram matrix on each such
    // cluster's subspace, where it is the operator that separates the pairs.
    let cluster_tol = 1e-9 * (1.0 + tri.norm());
    let mut flagged = vec![false; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (chis[end] - chis[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let sub = vectors.columns(start, end - start).into_owned();
            let projected = sub.transpose() * gram * &sub;
            let inner = eig_sym(&projected)?;
            let rotated = sub * inner.vectors;
            for (offset, col) in rotated.column_iter().enumerate() {
                for r in 0..n {
                    vectors[(r, start + offset)] = col[r];
                }
                flagged[start + offset] = true;
            }
        }
        start = end;
    }

    let mut out = Vec::with_capacity(n);
    let unit = sector_unit(sector);
    for i in 0..n {
        let mut v = vectors.column(i).into_owned();
        let norm = v.norm();
        if norm > 0.0 {
            v /= norm;
        }
        let chi = if flagged[i] {
            // Vector was rotated within the cluster; report its actual
            // Rayleigh value on the commuting matrix.
            (v.transpose() * tri * &v)[(0, 0)]
        } else {
            chis[i]
        };
        let lambda = (v.transpose() * gram * &v)[(0, 0)];
        let residual = (gram * &v - lambda * &v).norm();
        if !(chi.is_finite() && lambda.is_finite()) {
            return Err(Error::NonFinite("eigenpair"));
        }
        out.push(ProlatePair {
            chi,
            lambda,
            coeffs: v.iter().map(|&c| [c * unit[0], c * unit[1]]).collect(),
            sector,
            residual,
            flagged: flagged[i] && residual > residual_tol,
            params: *params,
        });
    }
    // Keep genuinely bad residuals flagged even outside clusters.
    for pair in &mut out {
        if pair.residual > residual_tol {
            pair.flagged = true;
        }
    }
    Ok(out)
}

/// Matched eigenpairs computed from explicitly supplied Gram and commuting
/// matrices (the production entry point [`prolate_eigenpairs`] builds both
/// from `params`; tests inject perturbed matrices here).
pub fn eigenpairs_from(
    gram: &BlockMatrix,
    tri: &BlockMatrix,
    params: &ModelParams,
) -> Result<Vec<ProlatePair>, Error> {
    if gram.order() != params.block_order() || tri.order() != params.block_order() {
        return Err(Error::DimensionMismatch(gram.order(), tri.order()));
    }
    let gs = sector_decompose(gram)?;
    let ts = sector_decompose(tri)?;
    let mut out = sector_pairs(&ts.plus, &gs.plus, 1, params)?;
    out.extend(sector_pairs(&ts.minus, &gs.minus, -1, params)?);
    out.sort_by(|a, b| {
        b.lambda
            .partial_cmp(&a.lambda)
            .expect("finite lambdas")
            .then(b.sector.cmp(&a.sector))
            .then(a.chi.partial_cmp(&b.chi).expect("finite chis"))
    });
    Ok(out)
}

/// All `2(N+1)` eigenpairs of the band-restriction problem, sorted by
/// descending concentration `lambda`.
pub fn prolate_eigenpairs(params: &ModelParams) -> Result<Vec<ProlatePair>, Error> {
    let gram = gram_m(params)?;
    let tri = commuting_matrix(params);
    eigenpairs_from(&gram, &tri, params)
}

/// Samples the vector-valued eigenfunction `phi(x) = sum_n coeffs[n] Q_n(x)`
/// on a grid; one 1x2 row per grid point.
pub fn eigenfunction_sample(pair: &ProlatePair, grid: &[f64]) -> Vec<[f64; 2]> {
    let handles: Vec<_> = (0..pair.coeffs.len())
        .map(|n| poly_q(&pair.params, n))
        .collect();
    grid.iter()
        .map(|&x| {
            let mut row = [0.0, 0.0];
            for (c, q) in pair.coeffs.iter().zip(&handles) {
                let contrib = q.eval(x).row_mul(*c);
                row[0] += contrib[0];
                row[1] += contrib[1];
            }
            row
        })
        .collect()
}

/// Residual of the integral eigen-equation at each requested `x`:
/// `| integral over (-1, omega) of phi(y) W(y) k(x, y)^T dy - lambda phi(x) |`.
/// Exact quadrature (polynomial integrand), so this genuinely tests the
/// eigenpair rather than the integration.
pub fn eigenfunction_integral_residuals(pair: &ProlatePair, xs: &[f64]) -> Result<Vec<f64>, Error> {
    let params = &pair.params;
    let rules = WeightedRules::new(params)?;
    let phi_at = |x: f64| {
        let mut row = [0.0, 0.0];
        for (n, c) in pair.coeffs.iter().enumerate() {
            let contrib = poly_q(params, n).eval(x).row_mul(*c);
            row[0] += contrib[0];
            row[1] += contrib[1];
        }
        row
    };
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let integral = rules.inner_product(
            |y| {
                let row = phi_at(y);
                Matrix2::new(row[0], row[1], 0.0, 0.0)
            },
            |y| kernel(params, x, y),
        );
        let phi_x = phi_at(x);
        let r0 = integral.get(0, 0) - pair.lambda * phi_x[0];
        let r1 = integral.get(0, 1) - pair.lambda * phi_x[1];
        out.push((r0 * r0 + r1 * r1).sqrt());
    }
    Ok(out)
}

/// Spectrum summary of one sector: matched `(lambda, chi)` lists sorted by
/// descending `lambda` (lambda clamped to `[0, 1]` for reporting), plus the
/// minimal consecutive gaps of the two spectra and their ratio.
#[derive(Debug, Clone, Serialize)]
pub struct SectorSpectrum {
    pub sector: i8,
    pub lambda: Vec<f64>,
    pub chi: Vec<f64>,
    /// Smallest consecutive gap of the Gram sector spectrum (`None` for
    /// order-one sectors).
    pub gap_min_gram: Option<f64>,
    /// Smallest consecutive gap of the commuting-matrix sector spectrum.
    pub gap_min_commuting: Option<f64>,
    /// `gap_min_commuting / gap_min_gram`; `None` when undefined.
    pub gap_ratio: Option<f64>,
    /// Set when the Gram spectrum is degenerate by construction
    /// (`omega = 1`: every concentration equals one).
    pub degenerate: bool,
}

/// Spectrum comparison report for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub alpha: f64,
    pub beta: f64,
    pub level: usize,
    pub omega: f64,
    pub sectors: Vec<SectorSpectrum>,
}

fn min_gap(sorted: &[f64]) -> Option<f64> {
    if sorted.len() < 2 {
        return None;
    }
    sorted
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .min_by(|a, b| a.partial_cmp(b).expect("finite gaps"))
}

/// Builds the spread-vs-clustered spectrum comparison: the Gram matrix's
/// eigenvalues crowd into (0, 1) while the commuting matrix's stay far
/// apart, which is the entire numerical case for diagonalizing the latter.
pub fn spectrum_report(params: &ModelParams) -> Result<SpectrumReport, Error> {
    let gram = gram_m(params)?;
    let tri = commuting_matrix(params);
    let pairs = eigenpairs_from(&gram, &tri, params)?;
    let gs = sector_decompose(&gram)?;
    let ts = sector_decompose(&tri)?;

    let mut sectors = Vec::with_capacity(2);
    for (sector, gsec, tsec) in [(1_i8, &gs.plus, &ts.plus), (-1, &gs.minus, &ts.minus)] {
        let lambda: Vec<f64> = pairs
            .iter()
            .filter(|p| p.sector == sector)
            .map(|p| p.lambda.clamp(0.0, 1.0))
            .collect();
        let chi: Vec<f64> = pairs
            .iter()
            .filter(|p| p.sector == sector)
            .map(|p| p.chi)
            .collect();
        let gap_min_gram = min_gap(&eig_sym(gsec)?.values);
        let gap_min_commuting = min_gap(&eig_sym_tridiag(tsec)?.values);
        let gap_ratio = match (gap_min_gram, gap_min_commuting) {
            (Some(g), Some(t)) if g > 0.0 => Some(t / g),
            _ => None,
        };
        sectors.push(SectorSpectrum {
            sector,
            lambda,
            chi,
            gap_min_gram,
            gap_min_commuting,
            gap_ratio,
            degenerate: params.omega() == 1.0,
        });
    }
    Ok(SpectrumReport {
        alpha: params.alpha(),
        beta: params.beta(),
        level: params.level(),
        omega: params.omega(),
        sectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::T;
    use crate::matpoly::weight_w;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};

    fn params(alpha: f64, beta: f64, level: usize, omega: f64) -> ModelParams {
        ModelParams::new(alpha, beta, level, omega).unwrap()
    }

    #[test]
    fn sector_roundtrip() {
        let mut b = BlockMatrix::zero(3);
        b.set_block(0, 0, Matrix2::from_id_t(1.0, 0.5));
        b.set_block(0, 2, Matrix2::from_id_t(-0.3, 2.0));
        b.set_block(1, 1, T);
        b.set_block(2, 1, Matrix2::from_id_t(0.0, -1.25));
        let pair = sector_decompose(&b).unwrap();
        let back = sector_reassemble(&pair);
        assert!((&b - &back).max_abs() < 1e-15);
    }

    #[test]
    fn sector_of_identity_blocks() {
        let mut b = BlockMatrix::zero(2);
        b.set_block(0, 0, Matrix2::identity());
        b.set_block(1, 1, Matrix2::identity());
        let pair = sector_decompose(&b).unwrap();
        assert!((pair.plus - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert!((pair.minus - DMatrix::identity(2, 2)).amax() < 1e-15);
    }

    #[test]
    fn sector_rejects_non_commuting_blocks() {
        let mut b = BlockMatrix::zero(2);
        b.set_block(0, 1, Matrix2::new(0.0, 1.0, 0.0, 0.0));
        assert!(matches!(
            sector_decompose(&b),
            Err(Error::NotExchangeCommuting { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn weight_splits_into_swapped_scalar_weights() {
        // Conjugation by U sends W(x) to diag(w_{beta,alpha}, w_{alpha,beta}).
        let p = params(0.7, -0.2, 2, 0.5);
        for &x in &[-0.8, 0.0, 0.6] {
            let w = weight_w(&p, x).unwrap();
            let a = 0.5 * (w.get(0, 0) + w.get(1, 1));
            let t = 0.5 * (w.get(0, 1) + w.get(1, 0));
            let w_ba = (1.0 - x).powf(-0.2) * (1.0 + x).powf(0.7);
            let w_ab = (1.0 - x).powf(0.7) * (1.0 + x).powf(-0.2);
            assert_relative_eq!(a + t, w_ba, max_relative = 1e-13);
            assert_relative_eq!(a - t, w_ab, max_relative = 1e-13);
        }
    }

    #[test]
    fn eig_of_diagonal_matrix() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let eig = eig_sym_tridiag(&a).unwrap();
        assert_eq!(eig.values, vec![-1.0, 2.0, 3.0]);
        for i in 0..3 {
            let v = eig.vectors.column(i);
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eig_two_by_two_closed_form() {
        let s3 = 3.0_f64.sqrt();
        let a = DMatrix::from_row_slice(2, 2, &[0.0, s3, s3, 0.0]);
        let eig = eig_sym_tridiag(&a).unwrap();
        assert_abs_diff_eq!(eig.values[0], -s3, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], s3, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(eig.vectors[(0, 1)].abs(), s, epsilon = 1e-13);
        assert_abs_diff_eq!(eig.vectors[(1, 1)].abs(), s, epsilon = 1e-13);
    }

    #[test]
    fn eig_random_tridiagonal_self_check() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 12;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = rng.gen_range(-2.0..2.0);
            if i + 1 < n {
                let e = rng.gen_range(0.1..1.5);
                a[(i, i + 1)] = e;
                a[(i + 1, i)] = e;
            }
        }
        let eig = eig_sym_tridiag(&a).unwrap();
        for i in 0..n {
            let v = eig.vectors.column(i).into_owned();
            let r = (&a * &v - eig.values[i] * &v).norm();
            assert!(r <= 1e-11, "eigen residual {r}");
            for j in 0..i {
                let dot = v.dot(&eig.vectors.column(j).into_owned());
                assert!(dot.abs() <= 1e-10);
            }
            if i > 0 {
                assert!(eig.values[i] >= eig.values[i - 1]);
            }
        }
    }

    #[test]
    fn eig_rejects_bad_structure() {
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eig_sym(&asym), Err(Error::NotSymmetric(_))));
        let mut full = DMatrix::zeros(3, 3);
        full[(0, 2)] = 1.0;
        full[(2, 0)] = 1.0;
        assert!(matches!(eig_sym_tridiag(&full), Err(Error::NotTridiagonal)));
    }

    #[test]
    fn level_one_legendre_closed_form_pairs() {
        // alpha = beta = 0, N = 1, omega = 0: each sector has commuting
        // matrix [[0, s3],[s3, 0]] and Gram [[1/2, -s3/4],[-s3/4, 1/2]], so
        // lambda = 1/2 -+ s3/4 matched to chi = +-s3.
        let p = params(0.0, 0.0, 1, 0.0);
        let pairs = prolate_eigenpairs(&p).unwrap();
        assert_eq!(pairs.len(), 4);
        let s3 = 3.0_f64.sqrt();
        for pair in &pairs {
            let want_lambda = 0.5 - pair.chi.signum() * s3 / 4.0;
            assert_abs_diff_eq!(pair.lambda, want_lambda, epsilon = 1e-12);
            assert_abs_diff_eq!(pair.chi.abs(), s3, epsilon = 1e-12);
            assert!(pair.residual <= 1e-10);
            assert!(!pair.flagged);
        }
        //

        // Sorted by descending concentration.
        assert!(pairs[0].lambda >= pairs[1].lambda);
        assert_abs_diff_eq!(pairs[0].lambda, 0.5 + s3 / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pairs[3].lambda, 0.5 - s3 / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn full_interval_concentrations_are_one() {
        let p = params(0.3, 1.2, 4, 1.0);
        let pairs = prolate_eigenpairs(&p).unwrap();
        assert_eq!(pairs.len(), 10);
        for pair in &pairs {
            assert_abs_diff_eq!(pair.lambda, 1.0, epsilon = 1e-12);
            assert!(pair.residual <= 1e-12);
        }
    }

    #[test]
    fn shared_eigenvector_residuals_and_completeness() {
        let p = params(0.0, 0.0, 20, 0.2);
        let gram = gram_m(&p).unwrap();
        let pairs = prolate_eigenpairs(&p).unwrap();
        let m_norm = gram.flatten().norm();
        let mut lambda_sum = 0.0;
        for pair in &pairs {
            assert!(
                pair.residual <= 1e-8 * (1.0 + m_norm),
                "residual {} too large",
                pair.residual
            );
            assert!(pair.lambda > -1e-12 && pair.lambda < 1.0 + 1e-12);
            lambda_sum += pair.lambda;
        }
        let trace = gram.flatten().trace();
        assert_abs_diff_eq!(lambda_sum, trace, epsilon = 1e-9 * (1.0 + trace.abs()));
    }

    #[test]
    fn coefficients_are_unit_norm_and_sector_structured() {
        let p = params(0.5, -0.5, 6, 0.3);
        for pair in prolate_eigenpairs(&p).unwrap() {
            let norm2: f64 = pair.coeffs.iter().map(|r| r[0] * r[0] + r[1] * r[1]).sum();
            assert_abs_diff_eq!(norm2, 1.0, epsilon = 1e-12);
            for row in &pair.coeffs {
                if pair.sector == 1 {
                    assert_abs_diff_eq!(row[0], row[1], epsilon = 1e-13);
                } else {
                    assert_abs_diff_eq!(row[0], -row[1], epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn eigenfunction_constant_at_level_zero() {
        let p = params(0.0, 0.0, 0, 0.5);
        let pairs = prolate_eigenpairs(&p).unwrap();
        assert_eq!(pairs.len(), 2);
        let grid = [-0.5, 0.0, 0.5];
        for pair in &pairs {
            let rows = eigenfunction_sample(pair, &grid);
            // Q_0 = Id / sqrt(2) for the Legendre weight, so each component
            // is constant +-1/2.
            for row in &rows {
                assert_abs_diff_eq!(row[0].abs(), 0.5, epsilon = 1e-13);
                assert_abs_diff_eq!(row[1].abs(), 0.5, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn eigenfunctions_satisfy_integral_equation() {
        let p = params(0.5, -0.5, 5, 0.7);
        let pairs = prolate_eigenpairs(&p).unwrap();
        let xs: Vec<f64> = (0..9).map(|i| -0.95 + 0.2 * i as f64).collect();
        for pair in pairs.iter().take(3) {
            let res = eigenfunction_integral_residuals(pair, &xs).unwrap();
            let worst = res.iter().cloned().fold(0.0, f64::max);
            assert!(worst <= 1e-8, "integral-equation residual {worst}");
        }
    }

    #[test]
    fn eigenfunctions_have_unit_full_interval_norm() {
        let p = params(0.3, 1.2, 4, 0.4);
        let full = p.on_full_interval().unwrap();
        let rules = WeightedRules::new(&full).unwrap();
        for pair in prolate_eigenpairs(&p).unwrap().iter().take(4) {
            let phi = |x: f64| {
                let mut row = [0.0, 0.0];
                for (n, c) in pair.coeffs.iter().enumerate() {
                    let v = poly_q(&p, n).eval(x).row_mul(*c);
                    row[0] += v[0];
                    row[1] += v[1];
                }
                Matrix2::new(row[0], row[1], 0.0, 0.0)
            };
            let g = rules.inner_product(phi, phi);
            assert_abs_diff_eq!(g.get(0, 0), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn spectrum_report_shape_and_gap_spread() {
        let p = params(0.0, 0.0, 20, 0.2);
        let report = spectrum_report(&p).unwrap();
        assert_eq!(report.sectors.len(), 2);
        for sec in &report.sectors {
            assert_eq!(sec.lambda.len(), 21);
            assert!(!sec.degenerate);
            for w in sec.lambda.windows(2) {
                assert!(w[0] >= w[1], "lambdas not descending");
            }
            let ratio = sec.gap_ratio.expect("both gaps defined");
            assert!(
                ratio >= 1e3,
                "spread ratio {ratio} too small: the commuting route loses its point"
            );
        }
    }

    #[test]
    fn spectrum_report_flags_full_interval() {
        let p = params(0.3, 1.2, 3, 1.0);
        let report = spectrum_report(&p).unwrap();
        for sec in &report.sectors {
            assert!(sec.degenerate);
            for l in &sec.lambda {
                assert_abs_diff_eq!(*l, 1.0, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn injected_matrices_are_honored() {
        // eigenpairs_from must analyze exactly what it is given: corrupt the
        // commuting matrix and the residuals blow up.
        let p = params(0.0, 0.0, 6, 0.3);
        let gram = gram_m(&p).unwrap();
        let mut bad = commuting_matrix(&p);
        let mut blk = bad.block(2, 5);
        blk.set(0, 0, blk.get(0, 0) + 0.5);
        blk.set(1, 1, blk.get(1, 1) + 0.5);
        bad.set_block(2, 5, blk);
        bad.set_block(5, 2, blk.transpose());
        // The corrupted matrix is still exchange-commuting and symmetric but
        // no longer tridiagonal.
        assert!(matches!(
            eigenpairs_from(&gram, &bad, &p),
            Err(Error::NotTridiagonal)
        ));
    }
}
