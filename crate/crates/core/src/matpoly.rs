//! The 2x2 matrix-valued Jacobi system.
//!
//! For exponents `alpha, beta > -1` the matrix weight on `(-1, 1)` is
//!
//! ```text
//! W(x) = 1/2 [ w_ab + w_ba,  w_ba - w_ab ]
//!            [ w_ba - w_ab,  w_ab + w_ba ],      w_ab = (1-x)^alpha (1+x)^beta,
//! ```
//!
//! and the matrix polynomials `P_n` are built the same way from the two scalar
//! Jacobi families with swapped exponents. Conjugation by `(Id + T)/sqrt(2)`
//! splits everything into the two scalar problems, which is precisely why the
//! exchange matrix `T` appears throughout; this module works with the matrix
//! forms directly so that structural claims (commutation with `T`, symmetry)
//! are checked rather than baked in.
//!
//! `P_n` has squared norm `h_n * Id` and leading coefficient `kappa_n * Id`,
//! both inherited from the scalar families. `Q_n = h_n^{-1/2} P_n` is the
//! orthonormal family. The second-order operator
//!
//! ```text
//! f D = f''(x) (1 - x^2) + f'(x) (-x (alpha+beta+2) Id + (alpha-beta) T)
//! ```
//!
//! acts on the right and has `P_n` as eigenfunctions with eigenvalue
//! `lambda_n = -n (n + alpha + beta + 1)`.

use crate::error::Error;
use crate::jacobi::{
    jacobi_deriv, jacobi_eval, jacobi_leading_coeff, jacobi_norm, jacobi_norm_ln, JacobiParams,
};
use crate::mat2::Matrix2;
use crate::params::ModelParams;

/// Scalar weight `(1-x)^a (1+x)^b`.
pub(crate) fn weight_scalar(a: f64, b: f64, x: f64) -> f64 {
    (1.0 - x).powf(a) * (1.0 + x).powf(b)
}

/// The matrix weight `W(x)`; `x` must lie strictly inside `(-1, 1)`.
pub fn weight_w(params: &ModelParams, x: f64) -> Result<Matrix2, Error> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::OutOfDomain(x));
    }
    let w_ab = weight_scalar(params.alpha(), params.beta(), x);
    let w_ba = weight_scalar(params.beta(), params.alpha(), x);
    Ok(Matrix2::from_id_t(0.5 * (w_ab + w_ba), 0.5 * (w_ba - w_ab)))
}

/// The degenerating coefficient `p(x) = (1 - x^2) W(x)` of the second-order
/// operator's divergence form.
pub fn weight_p(params: &ModelParams, x: f64) -> Result<Matrix2, Error> {
    Ok((1.0 - x * x) * weight_w(params, x)?)
}

/// Analytic derivative `d/dx [(1 - x^2) W(x)]`, from the scalar log
/// derivatives: `d/dx [(1-x^2) w_ab] = w_ab ((beta-alpha) - (alpha+beta+2) x)`.
///
/// Used to cross-check the first-order coefficient of the operator `D`
/// against its divergence-form factorization.
pub fn weight_p_deriv(params: &ModelParams, x: f64) -> Result<Matrix2, Error> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::OutOfDomain(x));
    }
    let (al, be) = (params.alpha(), params.beta());
    let w_ab = weight_scalar(al, be, x);
    let w_ba = weight_scalar(be, al, x);
    let d_ab = w_ab * ((be - al) - (al + be + 2.0) * x);
    let d_ba = w_ba * ((al - be) - (al + be + 2.0) * x);
    Ok(Matrix2::from_id_t(0.5 * (d_ab + d_ba), 0.5 * (d_ba - d_ab)))
}

/// Degree-tagged handle to a (scaled) matrix Jacobi polynomial, evaluable
/// together with its first two derivatives.
#[derive(Debug, Clone)]
pub struct MatPoly {
    ab: JacobiParams,
    n: usize,
    scale: f64,
}

impl MatPoly {
    pub fn degree(&self) -> usize {
        self.n
    }

    fn combine(&self, v_ab: f64, v_ba: f64) -> Matrix2 {
        Matrix2::from_id_t(
            self.scale * 0.5 * (v_ab + v_ba),
            self.scale * 0.5 * (v_ba - v_ab),
        )
    }

    pub fn eval(&self, x: f64) -> Matrix2 {
        self.combine(
            jacobi_eval(self.ab, self.n, x),
            jacobi_eval(self.ab.swapped(), self.n, x),
        )
    }

    pub fn deriv1(&self, x: f64) -> Matrix2 {
        self.combine(
            jacobi_deriv(self.ab, self.n, x, 1),
            jacobi_deriv(self.ab.swapped(), self.n, x, 1),
        )
    }

    pub fn deriv2(&self, x: f64) -> Matrix2 {
        self.combine(
            jacobi_deriv(self.ab, self.n, x, 2),
            jacobi_deriv(self.ab.swapped(), self.n, x, 2),
        )
    }

    /// A copy of the handle with its overall scalar factor multiplied by
    /// `factor` (e.g. `1/kappa_n` to pass to the monic normalization).
    pub fn scaled(&self, factor: f64) -> MatPoly {
        MatPoly {
            ab: self.ab,
            n: self.n,
            scale: self.scale * factor,
        }
    }
}

/// The degree-`n` matrix Jacobi polynomial `P_n`.
pub fn poly_p(params: &ModelParams, n: usize) -> MatPoly {
    MatPoly {
        ab: params.jacobi_ab(),
        n,
        scale: 1.0,
    }
}

/// The orthonormal polynomial `Q_n = h_n^{-1/2} P_n`.
pub fn poly_q(params: &ModelParams, n: usize) -> MatPoly {
    MatPoly {
        ab: params.jacobi_ab(),
        n,
        scale: (-0.5 * jacobi_norm_ln(params.jacobi_ab(), n)).exp(),
    }
}

/// Structural constants of the degree-`n` layer.
///
/// The three-term recurrence reads
/// `x P_n = a_coeff P_{n+1} + b_coeff T P_n + c_coeff P_{n-1}`,
/// and the differentiation formula
/// `(1-x^2) P_n' = -n x P_n - difform_t_coeff T P_n + gamma P_{n-1}`.
/// Boundary conventions: `P_{-1} = 0`, so `c_coeff`, `gamma` and
/// `gamma_tilde` are zero at `n = 0`.
#[derive(Debug, Clone, Copy)]
pub struct StructConstants {
    /// Squared norm `h_n` of `P_n`.
    pub h: f64,
    /// Leading coefficient `kappa_n` of `P_n`.
    pub kappa: f64,
    /// Recurrence coefficient of `P_{n+1}` (a positive multiple of the
    /// identity).
    pub a_coeff: f64,
    /// Recurrence coefficient of `P_n` (a multiple of the exchange matrix).
    pub b_coeff: f64,
    /// Recurrence coefficient of `P_{n-1}` (a multiple of the identity;
    /// positive for `n >= 1`).
    pub c_coeff: f64,
    /// Coefficient `gamma_{n-1}` of `P_{n-1}` in the differentiation formula.
    pub gamma: f64,
    /// Orthonormal-family version `gamma_{n-1} sqrt(h_{n-1} / h_n)`.
    pub gamma_tilde: f64,
    /// Eigenvalue `lambda_n = -n (n + alpha + beta + 1)` of the second-order
    /// operator.
    pub lambda: f64,
}

/// Exchange-matrix coefficient `n (alpha - beta) / (alpha + beta + 2n)` from
/// the differentiation formula (zero at `n = 0`, where the raw expression is
/// 0/0 whenever `alpha + beta = 0`).
pub(crate) fn difform_t_coeff(alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * (alpha - beta) / (alpha + beta + 2.0 * n as f64)
    }
}

/// Computes all structural constants for degree `n`.
///
/// Denominators are arranged so nothing divides by zero for any admissible
/// exponents: the `n = 0` recurrence coefficients use their cancelled closed
/// forms (`a = 2/(alpha+beta+2)`, `b = (alpha-beta)/(alpha+beta+2)`), which the
/// raw displays only reach after removing a common `alpha + beta` or
/// `alpha + beta + 1` factor.
pub fn struct_constants(params: &ModelParams, n: usize) -> StructConstants {
    let (al, be) = (params.alpha(), params.beta());
    let ab = params.jacobi_ab();
    let nf = n as f64;
    let s = 2.0 * nf + al + be;

    let (a_coeff, b_coeff, c_coeff) = if n == 0 {
        (2.0 / (al + be + 2.0), (al - be) / (al + be + 2.0), 0.0)
    } else {
        (
            2.0 * (nf + 1.0) * (nf + al + be + 1.0) / ((s + 1.0) * (s + 2.0)),
            (al * al - be * be) / (s * (s + 2.0)),
            2.0 * (nf + al) * (nf + be) / (s * (s + 1.0)),
        )
    };

    let (gamma, gamma_tilde) = if n == 0 {
        (0.0, 0.0)
    } else {
        let g = 2.0 * (nf + al) * (nf + be) / (al + be + 2.0 * nf);
        let ratio = (0.5 * (jacobi_norm_ln(ab, n - 1) - jacobi_norm_ln(ab, n))).exp();
        (g, g * ratio)
    };

    StructConstants {
        h: jacobi_norm(ab, n),
        kappa: jacobi_leading_coeff(ab, n),
        a_coeff,
        b_coeff,
        c_coeff,
        gamma,
        gamma_tilde,
        lambda: -nf * (nf + al + be + 1.0),
    }
}

/// Applies the second-order operator to `f` at `x` (the operator acts on the
/// right, its coefficients multiplying the derivatives of `f` from the right):
/// `(f D)(x) = f''(x) (1-x^2) + f'(x) (-x (alpha+beta+2) Id + (alpha-beta) T)`.
pub fn apply_d(params: &ModelParams, f: &MatPoly, x: f64) -> Result<Matrix2, Error> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::OutOfDomain(x));
    }
    let (al, be) = (params.alpha(), params.beta());
    let first_coeff = Matrix2::from_id_t(-x * (al + be + 2.0), al - be);
    Ok(f.deriv2(x) * (1.0 - x * x) + f.deriv1(x) * first_coeff)
}

/// Residual of the first-order differential system available when
/// `beta = alpha - 1` with `alpha > 0`:
///
/// ```text
/// P_n'(x) [ -x  1 ]  +  P_n(x) [ -2 alpha  0 ]  =  [ -2 alpha - n  0 ] P_n(x).
///         [ -1  x ]            [  0        0 ]     [  0            n ]
/// ```
///
/// Returns the maximum Frobenius-norm residual over the sample points.
/// Equivalent, sector by sector, to the classical weighted-derivative
/// identities `d/dx[(1-x)^alpha p_n^(alpha,alpha-1)] =
/// -(n+alpha)(1-x)^(alpha-1) p_n^(alpha-1,alpha)` and its reflection.
pub fn check_first_order_ode(
    params: &ModelParams,
    n: usize,
    samples: &[f64],
) -> Result<f64, Error> {
    let (al, be) = (params.alpha(), params.beta());
    if (be - (al - 1.0)).abs() > 1e-12 || al <= 0.0 {
        return Err(Error::NotFirstOrderFamily {
            alpha: al,
            beta: be,
        });
    }
    let p = poly_p(params, n);
    let nf = n as f64;
    let middle = Matrix2::diagonal(-2.0 * al, 0.0);
    let eigen = Matrix2::diagonal(-2.0 * al - nf, nf);
    let mut worst = 0.0_f64;
    for &x in samples {
        let coeff = Matrix2::new(-x, 1.0, -1.0, x);
        let lhs = p.deriv1(x) * coeff + p.eval(x) * middle;
        let rhs = eigen * p.eval(x);
        worst = worst.max((lhs - rhs).frobenius_norm());
    }
    Ok(worst)
}

/// Residual of the Christoffel-Darboux identity at degree `n >= 1`:
///
/// ```text
/// kappa_{n-1}/(kappa_n h_{n-1}) (P_{n-1}^*(y) P_n(x) - P_n^*(y) P_{n-1}(x))
///   = (x - y) sum_{k<n} P_k^*(y) P_k(x) / h_k.
/// ```
pub fn cd_residual(params: &ModelParams, n: usize, x: f64, y: f64) -> f64 {
    assert!(n >= 1, "the Christoffel-Darboux identity needs n >= 1");
    let ab = params.jacobi_ab();
    let pref = (crate::jacobi::jacobi_leading_coeff_ln(ab, n - 1)
        - crate::jacobi::jacobi_leading_coeff_ln(ab, n)
        - jacobi_norm_ln(ab, n - 1))
    .exp();
    let pn = poly_p(params, n);
    let pm = poly_p(params, n - 1);
    let lhs = pref * (pm.eval(y).transpose() * pn.eval(x) - pn.eval(y).transpose() * pm.eval(x));
    let mut rhs = Matrix2::zero();
    for k in 0..n {
        let pk = poly_p(params, k);
        rhs = rhs + pk.eval(y).transpose() * pk.eval(x) * (1.0 / jacobi_norm(ab, k));
    }
    rhs = (x - y) * rhs;
    (lhs - rhs).frobenius_norm()
}

/// Norm of the Christoffel-Darboux kernel-sum side, used by callers that
/// normalize `cd_residual` into a relative quantity.
pub fn cd_scale(params: &ModelParams, n: usize, x: f64, y: f64) -> f64 {
    let ab = params.jacobi_ab();
    let mut rhs = Matrix2::zero();
    for k in 0..n {
        let pk = poly_p(params, k);
        rhs = rhs + pk.eval(y).transpose() * pk.eval(x) * (1.0 / jacobi_norm(ab, k));
    }
    1.0 + ((x - y) * rhs).frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::chebyshev_u;
    use crate::mat2::T;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(alpha: f64, beta: f64) -> ModelParams {
        ModelParams::new(alpha, beta, 4, 0.5).unwrap()
    }

    fn sample_xs() -> Vec<f64> {
        (0..33)
            .map(|j| 0.99 * (std::f64::consts::PI * (2.0 * j as f64 + 1.0) / 66.0).cos())
            .collect()
    }

    #[test]
    fn weight_reduces_to_scalar_when_exponents_equal() {
        let p = params(0.7, 0.7);
        for &x in &[-0.6, 0.0, 0.4] {
            let w = weight_w(&p, x).unwrap();
            let scalar = weight_scalar(0.7, 0.7, x);
            assert_abs_diff_eq!(w.get(0, 0), scalar, epsilon = 1e-14);
            assert_abs_diff_eq!(w.get(0, 1), 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn weight_chebyshev_closed_form() {
        // alpha = 1/2, beta = -1/2: W(x) = (1 - x^2)^(-1/2) [[1, x], [x, 1]].
        let p = params(0.5, -0.5);
        for &x in &[-0.9, -0.25, 0.0, 0.6] {
            let w = weight_w(&p, x).unwrap();
            let c = (1.0 - x * x).powf(-0.5);
            let want = Matrix2::from_id_t(c, c * x);
            assert_abs_diff_eq!((w - want).max_abs(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn weight_p_chebyshev_value() {
        let p = params(0.5, -0.5);
        let got = weight_p(&p, 0.6).unwrap();
        // (1 - 0.36)^(1/2) [[1, 0.6], [0.6, 1]]
        let want = Matrix2::from_id_t(0.8, 0.48);
        assert_abs_diff_eq!((got - want).max_abs(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn weight_symmetric_positive_definite_commutes_with_exchange() {
        for &(al, be) in &[(0.0, 0.0), (0.5, -0.5), (1.7, 0.3), (-0.5, 1.1)] {
            let p = params(al, be);
            for &x in &[-0.95, -0.3, 0.2, 0.85] {
                let w = weight_w(&p, x).unwrap();
                assert!(w.is_symmetric(1e-14));
                assert!(w.is_positive_definite());
                assert!(w.exchange_commutator_norm() < 1e-14);
            }
        }
    }

    #[test]
    fn weight_domain_enforced() {
        let p = params(0.0, 0.0);
        assert!(weight_w(&p, 1.0).is_err());
        assert!(weight_w(&p, -1.0).is_err());
        assert!(weight_p(&p, 1.2).is_err());
    }

    #[test]
    fn weight_p_deriv_matches_finite_differences() {
        let p = params(0.8, -0.3);
        for &x in &[-0.5, 0.1, 0.6] {
            let h = 1e-6;
            let fd = (weight_p(&p, x + h).unwrap() - weight_p(&p, x - h).unwrap()) * (0.5 / h);
            let an = weight_p_deriv(&p, x).unwrap();
            assert!((fd - an).max_abs() < 1e-7 * (1.0 + an.max_abs()));
        }
    }

    #[test]
    fn poly_zero_is_identity() {
        let p = params(0.3, 1.2);
        assert_abs_diff_eq!(
            (poly_p(&p, 0).eval(0.77) - Matrix2::identity()).max_abs(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn poly_is_diagonal_for_equal_exponents() {
        let p = params(0.7, 0.7);
        let jp = JacobiParams::new(0.7, 0.7).unwrap();
        for n in 0..=5_usize {
            for &x in &[-0.4, 0.1, 0.9] {
                let m = poly_p(&p, n).eval(x);
                let scalar = jacobi_eval(jp, n, x);
                assert_abs_diff_eq!(m.get(0, 0), scalar, epsilon = 1e-13);
                assert_abs_diff_eq!(m.get(0, 1), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn chebyshev_monic_family_closed_form() {
        // For alpha = 1/2, beta = -1/2 the monic polynomials are
        // 2^{-n} [[U_n, -U_{n-1}], [-U_{n-1}, U_n]]; P_n = kappa_n * monic.
        let p = params(0.5, -0.5);
        for n in 0..=8_usize {
            let kappa = struct_constants(&p, n).kappa;
            let monic = poly_p(&p, n).scaled(1.0 / kappa);
            for &x in &[-0.8, -0.15, 0.3, 0.7] {
                let s = 0.5_f64.powi(n as i32);
                let want = Matrix2::from_id_t(
                    s * chebyshev_u(n as i32, x),
                    -s * chebyshev_u(n as i32 - 1, x),
                );
                assert!((monic.eval(x) - want).max_abs() < 1e-12 * (1.0 + want.max_abs()));
            }
        }
    }

    #[test]
    fn monic_norm_chebyshev_closed_form() {
        // || monic P_n || = sqrt(pi) / 2^n for alpha = 1/2, beta = -1/2.
        let p = params(0.5, -0.5);
        for n in 0..=10_usize {
            let sc = struct_constants(&p, n);
            let got = sc.h.sqrt() / sc.kappa;
            let want = std::f64::consts::PI.sqrt() * 0.5_f64.powi(n as i32);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn struct_constants_legendre_values() {
        let p = params(0.0, 0.0);
        let c1 = struct_constants(&p, 1);
        assert_relative_eq!(c1.a_coeff, 2.0 / 3.0, max_relative = 1e-14);
        assert_abs_diff_eq!(c1.b_coeff, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c1.lambda, -2.0, epsilon = 1e-14);
        let c0 = struct_constants(&p, 0);
        assert_eq!(c0.c_coeff, 0.0);
        assert_eq!(c0.gamma, 0.0);
        assert_eq!(c0.gamma_tilde, 0.0);
        assert_relative_eq!(c0.h, 2.0, max_relative = 1e-14);
        assert_relative_eq!(c0.kappa, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn struct_constants_survive_degenerate_sums() {
        // alpha + beta = -1 (0/0 in the raw n = 0 and k = 1 displays) and
        // alpha + beta = 0.
        for &(al, be) in &[(0.5, -0.5), (-0.5, 0.5), (0.25, -0.75), (0.0, 0.0)] {
            let p = params(al, be);
            for n in 0..=6_usize {
                let c = struct_constants(&p, n);
                assert!(c.a_coeff.is_finite() && c.a_coeff > 0.0);
                assert!(c.b_coeff.is_finite());
                assert!(c.c_coeff.is_finite() && c.c_coeff >= 0.0);
                assert!(c.gamma_tilde.is_finite());
                assert!(c.h.is_finite() && c.h > 0.0);
            }
        }
    }

    #[test]
    fn three_term_recurrence_holds() {
        for &(al, be) in &[(0.0, 0.0), (0.5, -0.5), (1.7, 0.3), (-0.5, 1.7)] {
            let p = params(al, be);
            for n in 0..=12_usize {
                let c = struct_constants(&p, n);
                let pn = poly_p(&p, n);
                let pnext = poly_p(&p, n + 1);
                for &x in &sample_xs() {
                    let mut rhs = pnext.eval(x) * c.a_coeff + T * pn.eval(x) * c.b_coeff;
                    if n >= 1 {
                        rhs = rhs + poly_p(&p, n - 1).eval(x) * c.c_coeff;
                    }
                    let lhs = pn.eval(x) * x;
                    let scale = 1.0 + lhs.frobenius_norm().max(rhs.frobenius_norm());
                    assert!(
                        (lhs - rhs).frobenius_norm() <= 1e-12 * scale,
                        "recurrence residual too large at n={n}, x={x}, ({al},{be})"
                    );
                }
            }
        }
    }

    #[test]
    fn differentiation_formula_holds() {
        for &(al, be) in &[(0.0, 0.0), (0.5, -0.5), (1.2, 0.4)] {
            let p = params(al, be);
            for n in 0..=12_usize {
                let c = struct_constants(&p, n);
                let tcoef = difform_t_coeff(al, be, n);
                let pn = poly_p(&p, n);
                for &x in &sample_xs() {
                    let lhs = pn.deriv1(x) * (1.0 - x * x);
                    let mut rhs = pn.eval(x) * (-(n as f64) * x) - T * pn.eval(x) * tcoef;
                    if n >= 1 {
                        rhs = rhs + poly_p(&p, n - 1).eval(x) * c.gamma;
                    }
                    let scale = 1.0 + lhs.frobenius_norm().max(rhs.frobenius_norm());
                    assert!((lhs - rhs).frobenius_norm() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn orthonormal_differentiation_formula_holds() {
        // Same identity for Q_n, with gamma replaced by gamma_tilde.
        for &(al, be) in &[(0.3, 1.2), (0.5, -0.5)] {
            let p = params(al, be);
            for n in 1..=10_usize {
                let c = struct_constants(&p, n);
                let qn = poly_q(&p, n);
                let qm = poly_q(&p, n - 1);
                let tcoef = difform_t_coeff(al, be, n);
                for &x in &[-0.8, -0.2, 0.5, 0.9] {
                    let lhs = qn.deriv1(x) * (1.0 - x * x);
                    let rhs = qn.eval(x) * (-(n as f64) * x) - T * qn.eval(x) * tcoef
                        + qm.eval(x) * c.gamma_tilde;
                    let scale = 1.0 + lhs.frobenius_norm().max(rhs.frobenius_norm());
                    assert!((lhs - rhs).frobenius_norm() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn proof_constant_identity() {
        // gamma_tilde_{n-1} kappa_n h_{n-1}^(1/2) / (kappa_{n-1} h_n^(1/2))
        //   = alpha + beta + 2n + 1.
        for &(al, be) in &[(0.0, 0.0), (0.5, -0.5), (1.7, -0.9), (0.3, 1.2)] {
            let p = params(al, be);
            for n in 1..=12_usize {
                let cn = struct_constants(&p, n);
                let cm = struct_constants(&p, n - 1);
                let got = cn.gamma_tilde * cn.kappa * cm.h.sqrt() / (cm.kappa * cn.h.sqrt());
                assert_relative_eq!(got, al + be + 2.0 * n as f64 + 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn handle_derivatives_match_finite_differences() {
        let p = params(0.4, 1.1);
        for n in 0..=9_usize {
            let f = poly_q(&p, n);
            for &x in &[-0.7, 0.05, 0.62] {
                let h = 1e-5;
                let fd1 = (f.eval(x + h) - f.eval(x - h)) * (0.5 / h);
                assert!(
                    (fd1 - f.deriv1(x)).max_abs() <= 1e-7 * (1.0 + f.deriv1(x).max_abs()),
                    "first derivative mismatch at n={n}, x={x}"
                );
                let fd2 = (f.eval(x + h) - f.eval(x) * 2.0 + f.eval(x - h)) * (1.0 / (h * h));
                assert!((fd2 - f.deriv2(x)).max_abs() <= 1e-5 * (1.0 + f.deriv2(x).max_abs()));
            }
        }
    }

    #[test]
    fn second_order_operator_eigenfunctions() {
        for &(al, be) in &[(0.0, 0.0), (0.5, -0.5), (1.7, 0.3), (0.3, 1.2)] {
            let p = params(al, be);
            for n in 0..=12_usize {
                let f = poly_p(&p, n);
                let lambda = struct_constants(&p, n).lambda;
                for &x in &sample_xs() {
                    let lhs = apply_d(&p, &f, x).unwrap();
                    let rhs = f.eval(x) * lambda;
                    let scale = 1.0 + lhs.frobenius_norm().max(rhs.frobenius_norm());
                    assert!((lhs - rhs).frobenius_norm() <= 1e-11 * scale);
                }
            }
        }
    }

    #[test]
    fn operator_on_degree_one_legendre() {
        // P_1 = x Id for alpha = beta = 0, so (P_1 D)(x) = -2 x Id.
        let p = params(0.0, 0.0);
        let f = poly_p(&p, 1);
        let got = apply_d(&p, &f, 0.4).unwrap();
        assert_abs_diff_eq!(
            (got - Matrix2::from_id_t(-0.8, 0.0)).max_abs(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn operator_annihilates_constants() {
        let p = params(0.3, 1.2);
        let q0 = poly_q(&p, 0);
        assert_abs_diff_eq!(
            apply_d(&p, &q0, 0.25).unwrap().max_abs(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn divergence_form_factorization_agrees() {
        // d/dx (P_n'(x) (1-x^2) W(x)) W(x)^{-1} expands to
        // P_n'' (1-x^2) + P_n' [d/dx((1-x^2)W)] W^{-1}; the bracket computed
        // from scalar derivatives must reproduce the first-order coefficient
        // of the operator, so both routes must agree pointwise.
        for &(al, be) in &[(0.0, 0.0), (0.5, -0.5), (1.3, 0.2)] {
            let p = params(al, be);
            for n in 0..=8_usize {
                let f = poly_p(&p, n);
                for &x in &[-0.75, -0.1, 0.45, 0.9] {
                    let direct = apply_d(&p, &f, x).unwrap();
                    let winv = weight_w(&p, x).unwrap().inverse().unwrap();
                    let via_factorization = f.deriv2(x) * (1.0 - x * x)
                        + f.deriv1(x) * (weight_p_deriv(&p, x).unwrap() * winv);
                    let scale = 1.0 + direct.frobenius_norm();
                    assert!((direct - via_factorization).frobenius_norm() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn first_order_system_degree_zero_exact() {
        let p = params(0.5, -0.5);
        let res = check_first_order_ode(&p, 0, &[-0.5, 0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(res, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn first_order_system_small_residual() {
        for &al in &[0.5, 2.0] {
            let p = params(al, al - 1.0);
            for n in 0..=8_usize {
                let res = check_first_order_ode(&p, n, &sample_xs()).unwrap();
                assert!(
                    res <= 1e-11,
                    "first-order residual {res} at alpha={al}, n={n}"
                );
            }
        }
    }

    #[test]
    fn first_order_system_requires_adjacent_exponents() {
        let p = params(0.5, 0.5);
        assert!(matches!(
            check_first_order_ode(&p, 2, &[0.0]),
            Err(Error::NotFirstOrderFamily { .. })
        ));
    }

    #[test]
    fn christoffel_darboux_degree_one_closed_form() {
        // At n = 1 the identity collapses to kappa_0/(kappa_1 h_0)
        // (P_1(x) - P_1(y)) = (x - y) Id / h_0, exact up to a few rounding
        // steps through the log-gamma prefactor.
        let p = params(0.3, 1.2);
        assert!(cd_residual(&p, 1, 0.3, -0.7) < 1e-14);
    }

    #[test]
    fn christoffel_darboux_residuals_small() {
        let cases = [(0.0, 0.0, 6, 0.3, -0.2), (0.5, -0.5, 4, 0.9, 0.1)];
        for &(al, be, n, x, y) in &cases {
            let p = params(al, be);
            assert!(cd_residual(&p, n, x, y) <= 1e-11 * cd_scale(&p, n, x, y));
        }
    }

    #[test]
    fn polynomials_commute_with_exchange_matrix() {
        let p = params(1.7, -0.9);
        for n in 0..=10_usize {
            for &x in &[-0.6, 0.2, 0.8] {
                assert!(poly_p(&p, n).eval(x).exchange_commutator_norm() < 1e-12);
            }
        }
    }
}
