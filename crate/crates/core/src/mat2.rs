//! A small dense 2x2 real matrix.
//!
//! Everything in this crate lives in the commutative algebra spanned by the
//! identity and the exchange matrix `T = [[0, 1], [1, 0]]`, but the type is a
//! general 2x2 matrix so that structural properties (symmetry, commutation
//! with `T`) are verified rather than assumed.

use std::ops::{Add, Mul, Neg, Sub};

/// Dense 2x2 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Matrix2 {
    m: [[f64; 2]; 2],
}

/// The exchange (flip) matrix `T = [[0, 1], [1, 0]]`.
///
/// `T` squares to the identity and generates, together with the identity, the
/// commutative algebra containing the weight, the polynomials and all the
/// operator blocks built here.
pub const T: Matrix2 = Matrix2 {
    m: [[0.0, 1.0], [1.0, 0.0]],
};

impl Matrix2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Matrix2 {
            m: [[a, b], [c, d]],
        }
    }

    pub const fn zero() -> Self {
        Matrix2::new(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Matrix2::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Builds `p * Id + q * T`, the generic element of the algebra spanned by
    /// the identity and the exchange matrix.
    pub const fn from_id_t(p: f64, q: f64) -> Self {
        Matrix2::new(p, q, q, p)
    }

    pub const fn diagonal(a: f64, d: f64) -> Self {
        Matrix2::new(a, 0.0, 0.0, d)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.m[i][j] = v;
    }

    pub fn transpose(&self) -> Self {
        Matrix2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Inverse, or `None` when the determinant underflows to an unusable size.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Matrix2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.m[0][1] - self.m[1][0]).abs() <= tol
    }

    /// Positive definiteness of a (numerically) symmetric matrix, via the
    /// leading-minor test.
    pub fn is_positive_definite(&self) -> bool {
        self.m[0][0] > 0.0 && self.det() > 0.0
    }

    /// Frobenius norm of `self * T - T * self`.
    pub fn exchange_commutator_norm(&self) -> f64 {
        (*self * T - T * *self).frobenius_norm()
    }

    /// Applies the matrix to a row vector from the right: `row * self`.
    pub fn row_mul(&self, row: [f64; 2]) -> [f64; 2] {
        [
            row[0] * self.m[0][0] + row[1] * self.m[1][0],
            row[0] * self.m[0][1] + row[1] * self.m[1][1],
        ]
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] - rhs.m[0][0],
            self.m[0][1] - rhs.m[0][1],
            self.m[1][0] - rhs.m[1][0],
            self.m[1][1] - rhs.m[1][1],
        )
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self * -1.0
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let a = &self.m;
        let b = &rhs.m;
        Matrix2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for Matrix2 {
    type Output = Matrix2;
    fn mul(self, s: f64) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }
}

impl Mul<Matrix2> for f64 {
    type Output = Matrix2;
    fn mul(self, m: Matrix2) -> Matrix2 {
        m * self
    }
}
