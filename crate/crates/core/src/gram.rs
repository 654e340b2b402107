//! Weighted inner products over `(-1, omega)` and truncation Gram matrices.
//!
//! The matrix weight splits against two constant orthogonal projectors,
//!
//! ```text
//! W(x) = w_ab(x) (Id - T)/2 + w_ba(x) (Id + T)/2,
//! ```
//!
//! so every matrix integral reduces to two scalar-weighted integrals. Each
//! part gets its own Gauss rule:
//!
//! * `omega = 1`: the exact rule for the part's own exponent pair, so
//!   polynomial integrands up to degree `2m - 1` are integrated exactly;
//! * `omega < 1`: a rule with exponents `(0, b)` transplanted onto
//!   `(-1, omega)`, absorbing the `(1 + x)^b` factor whose singularity at
//!   `-1` sits inside the domain, while the complementary `(1 - x)^a` factor
//!   is analytic on the closed interval and multiplies the integrand.
//!
//! The Gram matrix of the orthonormal family restricted to `(-1, omega)` is
//! the coefficient-space form of the band-restriction operator; its
//! eigenvalues lie strictly between 0 and 1 for `omega < 1` and collapse to 1
//! at `omega = 1`.

use crate::block::BlockMatrix;
use crate::error::Error;
use crate::mat2::Matrix2;
use crate::matpoly::poly_q;
use crate::params::ModelParams;
use crate::quadrature::QuadratureRule;

struct Part {
    rule: QuadratureRule,
    /// Exponent `e` of an extra analytic `(1 - x)^e` factor to evaluate
    /// pointwise; `None` when the rule already carries the full weight.
    smooth_exp: Option<f64>,
    projector: Matrix2,
}

impl Part {
    fn factor(&self, x: f64) -> f64 {
        match self.smooth_exp {
            Some(e) => (1.0 - x).powf(e),
            None => 1.0,
        }
    }
}

/// Quadrature data for inner products against the matrix weight over
/// `(-1, omega)`.
pub struct WeightedRules {
    parts: [Part; 2],
    order: usize,
}

impl WeightedRules {
    /// Rules at the model's own quadrature order.
    pub fn new(params: &ModelParams) -> Result<Self, Error> {
        Self::with_order(params, params.quad_order())
    }

    /// Rules at an explicit order `m` (used for convergence diagnostics);
    /// `m` must still resolve degree `2 * level` polynomials.
    pub fn with_order(params: &ModelParams, m: usize) -> Result<Self, Error> {
        let min = params.level() + 1;
        if m < min {
            return Err(Error::QuadOrderTooSmall { got: m, min });
        }
        let (al, be) = (params.alpha(), params.beta());
        let omega = params.omega();
        let proj_ab = Matrix2::from_id_t(0.5, -0.5);
        let proj_ba = Matrix2::from_id_t(0.5, 0.5);
        let parts = if omega == 1.0 {
            [
                Part {
                    rule: QuadratureRule::gauss_jacobi((al, be), m)?,
                    smooth_exp: None,
                    projector: proj_ab,
                },
                Part {
                    rule: QuadratureRule::gauss_jacobi((be, al), m)?,
                    smooth_exp: None,
                    projector: proj_ba,
                },
            ]
        } else {
            [
                Part {
                    rule: QuadratureRule::gauss_jacobi((0.0, be), m)?.mapped_to(-1.0, omega),
                    smooth_exp: Some(al),
                    projector: proj_ab,
                },
                Part {
                    rule: QuadratureRule::gauss_jacobi((0.0, al), m)?.mapped_to(-1.0, omega),
                    smooth_exp: Some(be),
                    projector: proj_ba,
                },
            ]
        };
        Ok(WeightedRules { parts, order: m })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Approximates the matrix inner product
    /// `integral over (-1, omega) of f(x) W(x) g(x)^T dx`.
    pub fn inner_product<F, G>(&self, f: F, g: G) -> Matrix2
    where
        F: Fn(f64) -> Matrix2,
        G: Fn(f64) -> Matrix2,
    {
        let mut acc = Matrix2::zero();
        for part in &self.parts {
            for (&x, &w) in part.rule.nodes().iter().zip(part.rule.weights()) {
                acc = acc + f(x) * part.projector * g(x).transpose() * (w * part.factor(x));
            }
        }
        acc
    }
}

/// One-shot inner product `integral over (-1, omega) of f W g^T` at the
/// model's quadrature order.
pub fn inner_product_omega<F, G>(params: &ModelParams, f: F, g: G) -> Result<Matrix2, Error>
where
    F: Fn(f64) -> Matrix2,
    G: Fn(f64) -> Matrix2,
{
    Ok(WeightedRules::new(params)?.inner_product(f, g))
}

/// Gram matrix `M` of the restriction to `(-1, omega)`, with blocks
/// `M[m][k] = integral of Q_m W Q_k^T` for `m, k = 0..=level`, at quadrature
/// order `m_quad`.
pub fn gram_with_order(params: &ModelParams, m_quad: usize) -> Result<BlockMatrix, Error> {
    let rules = WeightedRules::with_order(params, m_quad)?;
    let order = params.block_order();
    // Tabulate Q_n at every node of every part once; the pair loop below then
    // costs one 2x2 multiply-accumulate per (pair, node).
    let handles: Vec<_> = (0..order).map(|n| poly_q(params, n)).collect();
    let tables: Vec<Vec<Vec<Matrix2>>> = rules
        .parts
        .iter()
        .map(|part| {
            part.rule
                .nodes()
                .iter()
                .map(|&x| handles.iter().map(|q| q.eval(x)).collect())
                .collect()
        })
        .collect();

    let mut gram = BlockMatrix::zero(order);
    for m in 0..order {
        for k in 0..=m {
            let mut acc = Matrix2::zero();
            for (part, table) in rules.parts.iter().zip(&tables) {
                for (i, (&x, &w)) in part
                    .rule
                    .nodes()
                    .iter()
                    .zip(part.rule.weights())
                    .enumerate()
                {
                    let qm = table[i][m];
                    let qk = table[i][k];
                    acc = acc + qm * part.projector * qk.transpose() * (w * part.factor(x));
                }
            }
            gram.set_block(m, k, acc);
            if k != m {
                gram.set_block(k, m, acc.transpose());
            }
        }
    }

    if !gram.flatten().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("gram matrix"));
    }
    Ok(gram)
}

/// Gram matrix at the model's own quadrature order.
pub fn gram_m(params: &ModelParams) -> Result<BlockMatrix, Error> {
    gram_with_order(params, params.quad_order())
}

/// Outcome of comparing the Gram matrix at the working quadrature order
/// against the same matrix at twice the order.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceReport {
    pub coarse_order: usize,
    pub fine_order: usize,
    /// Largest entrywise change between the two resolutions.
    pub max_change: f64,
    /// Whether `max_change` is within the model tolerance.
    pub converged: bool,
}

/// Doubles the quadrature order and reports how much the Gram matrix moves;
/// a failure here means the working order cannot be trusted for these
/// parameters.
pub fn convergence_check(params: &ModelParams) -> Result<ConvergenceReport, Error> {
    let coarse = gram_m(params)?;
    let fine_order = 2 * params.quad_order();
    let fine = gram_with_order(params, fine_order)?;
    let max_change = (&coarse - &fine).max_abs();
    Ok(ConvergenceReport {
        coarse_order: params.quad_order(),
        fine_order,
        max_change,
        converged: max_change <= params.tol(),
    })
}
