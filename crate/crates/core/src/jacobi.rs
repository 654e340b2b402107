//! Scalar Jacobi polynomials for the weight `(1-x)^a (1+x)^b` on `(-1, 1)`.
//!
//! The family is normalized so that `p_n(1) = binomial(n + a, n)`, i.e. the
//! classical normalization whose squared norm is
//!
//! ```text
//! h_n = 2^(a+b+1) Gamma(a+n+1) Gamma(b+n+1)
//!       / ((a+b+2n+1) n! Gamma(a+b+n+1)).
//! ```
//!
//! Evaluation uses the three-term recurrence (stable for all admissible
//! exponents), never a hypergeometric series; derivatives use the exact
//! parameter-shift identity `p_n'(x) = (n+a+b+1)/2 * p_{n-1}^{(a+1,b+1)}(x)`.
//! All Gamma-function ratios are computed in the log domain, with arguments
//! arranged to stay strictly positive for every `a, b > -1`.

use crate::error::Error;
use statrs::function::gamma::ln_gamma;

/// Validated exponent pair `(a, b)` for the weight `(1-x)^a (1+x)^b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    a: f64,
    b: f64,
}

impl JacobiParams {
    /// Both exponents must be finite and greater than -1 for the weight to be
    /// integrable.
    pub fn new(a: f64, b: f64) -> Result<Self, Error> {
        if !(a.is_finite() && b.is_finite() && a > -1.0 && b > -1.0) {
            return Err(Error::InvalidExponents { alpha: a, beta: b });
        }
        Ok(JacobiParams { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The reflected pair `(b, a)`.
    pub fn swapped(&self) -> Self {
        JacobiParams {
            a: self.b,
            b: self.a,
        }
    }

    /// Both exponents shifted up by one, as used by the derivative identity.
    fn shifted(&self) -> Self {
        JacobiParams {
            a: self.a + 1.0,
            b: self.b + 1.0,
        }
    }
}

/// Evaluates the degree-`n` Jacobi polynomial at `x` by the three-term
/// recurrence.
///
/// The recurrence is written in the multiplied-through form whose denominator
/// `2(n+1)(n+a+b+1)(2n+a+b)` is strictly positive for every `n >= 1` and
/// `a, b > -1`; the `n = 0` step uses the cancelled closed form of `p_1`, so
/// no intermediate expression can hit 0/0 even when `a + b` is `0` or `-1`.
pub fn jacobi_eval(p: JacobiParams, n: usize, x: f64) -> f64 {
    let (a, b) = (p.a, p.b);
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a + b + 2.0) * x + 0.5 * (a - b);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c1 = (s + 1.0) * (s * (s + 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (kf + a) * (kf + b) * (s + 2.0);
        let c4 = 2.0 * (kf + 1.0) * (kf + a + b + 1.0) * s;
        let next = (c1 * cur - c3 * prev) / c4;
        prev = cur;
        cur = next;
    }
    cur
}

/// First or second derivative of the degree-`n` Jacobi polynomial at `x`.
///
/// `order` must be 1 or 2. Uses the parameter-shift identity once or twice;
/// degrees that differentiate to zero return exactly `0.0`.
pub fn jacobi_deriv(p: JacobiParams, n: usize, x: f64, order: u32) -> f64 {
    match order {
        1 => {
            if n == 0 {
                0.0
            } else {
                0.5 * (n as f64 + p.a + p.b + 1.0) * jacobi_eval(p.shifted(), n - 1, x)
            }
        }
        2 => {
            if n < 2 {
                0.0
            } else {
                let nf = n as f64;
                0.25 * (nf + p.a + p.b + 1.0)
                    * (nf + p.a + p.b + 2.0)
                    * jacobi_eval(p.shifted().shifted(), n - 2, x)
            }
        }
        _ => panic!("jacobi_deriv supports derivative orders 1 and 2, got {order}"),
    }
}

/// Natural log of the squared norm `h_n` of the degree-`n` polynomial.
///
/// Ratios of `h_n` across neighbouring degrees should be formed by
/// exponentiating differences of this function rather than dividing the norms
/// themselves.
pub fn jacobi_norm_ln(p: JacobiParams, n: usize) -> f64 {
    let (a, b) = (p.a, p.b);
    let ln2 = std::f64::consts::LN_2;
    if n == 0 {
        // h_0 = 2^(a+b+1) B(a+1, b+1); written via Gamma(a+b+2) > 0 so the
        // argument stays positive even when a + b + 1 <= 0.
        return (a + b + 1.0) * ln2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0);
    }
    let nf = n as f64;
    (a + b + 1.0) * ln2 + ln_gamma(a + nf + 1.0) + ln_gamma(b + nf + 1.0)
        - (a + b + 2.0 * nf + 1.0).ln()
        - ln_gamma(nf + 1.0)
        - ln_gamma(a + b + nf + 1.0)
}

/// Squared norm `h_n = integral of p_n^2 against the weight over (-1, 1)`.
pub fn jacobi_norm(p: JacobiParams, n: usize) -> f64 {
    jacobi_norm_ln(p, n).exp()
}

/// Natural log of the leading coefficient `kappa_n` of the degree-`n`
/// polynomial (`kappa_0 = 1`).
pub fn jacobi_leading_coeff_ln(p: JacobiParams, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (a, b) = (p.a, p.b);
    let nf = n as f64;
    ln_gamma(a + b + 2.0 * nf + 1.0)
        - nf * std::f64::consts::LN_2
        - ln_gamma(nf + 1.0)
        - ln_gamma(a + b + nf + 1.0)
}

/// Leading coefficient `kappa_n` (symmetric in the two exponents).
pub fn jacobi_leading_coeff(p: JacobiParams, n: usize) -> f64 {
    jacobi_leading_coeff_ln(p, n).exp()
}

/// Total mass of the weight: `integral of (1-x)^a (1+x)^b over (-1, 1)`,
/// i.e. `2^(a+b+1) B(a+1, b+1)`.
pub fn jacobi_weight_mass(a: f64, b: f64) -> f64 {
    ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
    .exp()
}

/// Chebyshev polynomial of the second kind, with the convention
/// `U_{-1} = 0` so that degree-shifted formulas hold at the boundary.
pub fn chebyshev_u(n: i32, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let mut prev = 0.0; // U_{-1}
    let mut cur = 1.0; // U_0
    for _ in 0..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}
