//! Gauss-Jacobi quadrature via the Golub-Welsch algorithm.
//!
//! A rule carries its weight convention with it: `integrate(f)` approximates
//! the integral of `f` **against** the weight `(hi - x)^a (x - lo)^b` over the
//! rule's domain `(lo, hi)`; the weight is never evaluated explicitly, so
//! integrable endpoint singularities cost nothing.

use crate::error::Error;
use nalgebra::DMatrix;

/// Gauss-type quadrature rule with endpoint-exponent weight bookkeeping.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: (f64, f64),
    exponents: (f64, f64),
}

impl QuadratureRule {
    /// Builds the `m`-point Gauss rule for the weight `(1-x)^a (1+x)^b` on
    /// `(-1, 1)`.
    ///
    /// Nodes are the eigenvalues of the symmetric tridiagonal recurrence
    /// matrix of the monic orthogonal family; each weight is the total mass of
    /// the weight times the squared first component of the corresponding
    /// normalized eigenvector. Nodes come back sorted ascending, strictly
    /// inside the interval, with strictly positive weights.
    ///
    /// # Errors
    ///
    /// Rejects exponents at or below -1, `m = 0`, and (never observed in
    /// practice) failure of the symmetric eigensolver to converge.
    pub fn gauss_jacobi(exponents: (f64, f64), m: usize) -> Result<Self, Error> {
        let (a, b) = exponents;
        if !(a.is_finite() && b.is_finite() && a > -1.0 && b > -1.0) {
            return Err(Error::InvalidExponents { alpha: a, beta: b });
        }
        if m == 0 {
            return Err(Error::EmptyRule);
        }

        // Monic three-term recurrence coefficients for the Jacobi weight.
        // diag(k) and the squared off-diagonal offdiag2(k) are written so no
        // denominator can vanish for a, b > -1; the k = 1 off-diagonal uses
        // the form with the (a + b + 1) factor cancelled, which otherwise
        // produces 0/0 when a + b = -1.
        let diag = |k: usize| -> f64 {
            if k == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                let s = 2.0 * k as f64 + a + b;
                (b * b - a * a) / (s * (s + 2.0))
            }
        };
        let offdiag2 = |k: usize| -> f64 {
            if k == 1 {
                4.0 * (a + 1.0) * (b + 1.0) / ((a + b + 2.0).powi(2) * (a + b + 3.0))
            } else {
                let kf = k as f64;
                let s = 2.0 * kf + a + b;
                4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            }
        };

        let mut jac = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            jac[(k, k)] = diag(k);
            if k > 0 {
                let e = offdiag2(k).sqrt();
                jac[(k, k - 1)] = e;
                jac[(k - 1, k)] = e;
            }
        }

        let eig = nalgebra::linalg::SymmetricEigen::try_new(jac, f64::EPSILON, 200 * m.max(4))
            .ok_or(Error::RuleEigenFailure { a, b, m })?;

        let mass = crate::jacobi::jacobi_weight_mass(a, b);
        let mut pairs: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mass * v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());

        Ok(QuadratureRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
            domain: (-1.0, 1.0),
            exponents,
        })
    }

    /// Affinely remaps the rule onto `(lo, hi)`, rescaling the weights by the
    /// Jacobian factor `((hi - lo)/2)^(a + b + 1)` so they keep integrating
    /// against the (transplanted) endpoint weight. The identity map returns
    /// the rule unchanged.
    pub fn mapped_to(&self, lo: f64, hi: f64) -> Self {
        assert!(
            lo < hi && lo.is_finite() && hi.is_finite(),
            "quadrature target interval must satisfy lo < hi, got ({lo}, {hi})"
        );
        if self.domain == (lo, hi) {
            return self.clone();
        }
        let (a, b) = self.exponents;
        let half = 0.5 * (hi - lo);
        let (d0, d1) = self.domain;
        let scale = half / (0.5 * (d1 - d0));
        let jacobian = scale.powf(a + b + 1.0);
        QuadratureRule {
            nodes: self.nodes.iter().map(|&x| lo + (x - d0) * scale).collect(),
            weights: self.weights.iter().map(|&w| w * jacobian).collect(),
            domain: (lo, hi),
            exponents: self.exponents,
        }
    }

    /// Approximates the integral of `f` against the rule's weight over its
    /// domain.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn exponents(&self) -> (f64, f64) {
        self.exponents
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
