//! Validated parameter set for one time-and-band limiting instance.

use crate::error::Error;
use crate::jacobi::JacobiParams;

/// Default residual tolerance used by verification checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Smallest quadrature order accepted for truncation level `n`: enough for
/// exactness on every polynomial integrand the crate forms, plus headroom for
/// the absorbed smooth weight factors on sub-intervals.
pub fn min_quad_order(level: usize) -> usize {
    (2 * level + 16).max(64)
}

/// Parameters of one instance: weight exponents `alpha`, `beta`, truncation
/// level `N` (polynomial degrees `0..=N` are kept), band edge `omega`, and the
/// numerical knobs (quadrature order, tolerance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
    level: usize,
    omega: f64,
    quad_order: usize,
    tol: f64,
}

impl ModelParams {
    /// Validates and builds a parameter set with default quadrature order and
    /// tolerance.
    ///
    /// Requirements: `alpha > -1`, `beta > -1`, `omega` in `(-1, 1]`.
    pub fn new(alpha: f64, beta: f64, level: usize, omega: f64) -> Result<Self, Error> {
        if !(alpha.is_finite() && beta.is_finite() && alpha > -1.0 && beta > -1.0) {
            return Err(Error::InvalidExponents { alpha, beta });
        }
        if !(omega.is_finite() && omega > -1.0 && omega <= 1.0) {
            return Err(Error::InvalidBandEdge(omega));
        }
        Ok(ModelParams {
            alpha,
            beta,
            level,
            omega,
            quad_order: min_quad_order(level),
            tol: DEFAULT_TOL,
        })
    }

    /// Overrides the quadrature order. Orders below `min_quad_order(level)`
    /// are rejected rather than silently degrading accuracy.
    pub fn with_quad_order(mut self, quad_order: usize) -> Result<Self, Error> {
        let min = min_quad_order(self.level);
        if quad_order < min {
            return Err(Error::QuadOrderTooSmall {
                got: quad_order,
                min,
            });
        }
        self.quad_order = quad_order;
        Ok(self)
    }

    /// Overrides the check tolerance (must be positive and finite).
    pub fn with_tol(mut self, tol: f64) -> Result<Self, Error> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidTolerance(tol));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Truncation level `N`; the model keeps degrees `0..=N`, i.e. `N + 1`
    /// block rows.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Number of block rows/columns, `N + 1`.
    pub fn block_order(&self) -> usize {
        self.level + 1
    }

    /// The scalar exponent pair `(alpha, beta)`.
    pub fn jacobi_ab(&self) -> JacobiParams {
        JacobiParams::new(self.alpha, self.beta).expect("validated at construction")
    }

    /// The reflected scalar exponent pair `(beta, alpha)`.
    pub fn jacobi_ba(&self) -> JacobiParams {
        self.jacobi_ab().swapped()
    }

    /// The same instance with the band edge moved to `omega = 1` (full
    /// interval), keeping every other setting. Used wherever the
    /// basis-defining full-interval inner product is needed alongside a
    /// restricted one.
    pub fn on_full_interval(&self) -> Result<Self, Error> {
        let mut full = *self;
        full.omega = 1.0;
        Ok(full)
    }
}
