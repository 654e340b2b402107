//! Square matrices of 2x2 blocks.
//!
//! Truncated operators in this crate index blocks by polynomial degree
//! `0..=N`, so a `BlockMatrix` of order `N + 1` flattens to a
//! `2(N+1) x 2(N+1)` scalar matrix with block `(m, k)` occupying rows
//! `2m..2m+2` and columns `2k..2k+2`.

use crate::mat2::Matrix2;
use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    order: usize,
    blocks: Vec<Matrix2>,
}

impl BlockMatrix {
    /// Zero matrix with `order * order` blocks.
    pub fn zero(order: usize) -> Self {
        assert!(order > 0, "block order must be positive");
        BlockMatrix {
            order,
            blocks: vec![Matrix2::zero(); order * order],
        }
    }

    /// Number of block rows (= block columns).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Scalar dimension `2 * order`.
    pub fn dim(&self) -> usize {
        2 * self.order
    }

    pub fn block(&self, row: usize, col: usize) -> Matrix2 {
        assert!(
            row < self.order && col < self.order,
            "block index out of range"
        );
        self.blocks[row * self.order + col]
    }

    pub fn set_block(&mut self, row: usize, col: usize, value: Matrix2) {
        assert!(
            row < self.order && col < self.order,
            "block index out of range"
        );
        self.blocks[row * self.order + col] = value;
    }

    pub fn add_to_block(&mut self, row: usize, col: usize, value: Matrix2) {
        let cur = self.block(row, col);
        self.set_block(row, col, cur + value);
    }

    /// Flattens to a dense scalar matrix.
    pub fn flatten(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for m in 0..self.order {
            for k in 0..self.order {
                let b = self.block(m, k);
                for i in 0..2 {
                    for j in 0..2 {
                        out[(2 * m + i, 2 * k + j)] = b.get(i, j);
                    }
                }
            }
        }
        out
    }

    /// Rebuilds the block structure from a dense scalar matrix of even size.
    pub fn from_flat(flat: &DMatrix<f64>) -> Self {
        let d = flat.nrows();
        assert!(
            d == flat.ncols() && d % 2 == 0 && d > 0,
            "need a square matrix of even size"
        );
        let order = d / 2;
        let mut out = BlockMatrix::zero(order);
        for m in 0..order {
            for k in 0..order {
                out.set_block(
                    m,
                    k,
                    Matrix2::new(
                        flat[(2 * m, 2 * k)],
                        flat[(2 * m, 2 * k + 1)],
                        flat[(2 * m + 1, 2 * k)],
                        flat[(2 * m + 1, 2 * k + 1)],
                    ),
                );
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = BlockMatrix::zero(self.order);
        for m in 0..self.order {
            for k in 0..self.order {
                out.set_block(k, m, self.block(m, k).transpose());
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let f = b.frobenius_norm();
                f * f
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(|b| b.max_abs()).fold(0.0, f64::max)
    }

    /// Largest deviation from scalar symmetry, `max |M - M^T|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for m in 0..self.order {
            for k in 0..=m {
                let d = (self.block(m, k) - self.block(k, m).transpose()).max_abs();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest block norm outside the tridiagonal band `|row - col| <= 1`.
    pub fn off_tridiagonal_max(&self) -> f64 {
        let mut worst = 0.0_f64;
        for m in 0..self.order {
            for k in 0..self.order {
                if m.abs_diff(k) > 1 {
                    worst = worst.max(self.block(m, k).max_abs());
                }
            }
        }
        worst
    }

    pub fn matmul(&self, other: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.order, other.order, "block orders must match");
        let mut out = BlockMatrix::zero(self.order);
        for m in 0..self.order {
            for k in 0..self.order {
                let mut acc = Matrix2::zero();
                for j in 0..self.order {
                    acc = acc + self.block(m, j) * other.block(j, k);
                }
                out.set_block(m, k, acc);
            }
        }
        out
    }
}

impl std::ops::Sub for &BlockMatrix {
    type Output = BlockMatrix;
    fn sub(self, rhs: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.order, rhs.order, "block orders must match");
        let mut out = BlockMatrix::zero(self.order);
        for (i, (a, b)) in self.blocks.iter().zip(rhs.blocks.iter()).enumerate() {
            out.blocks[i] = *a - *b;
        }
        out
    }
}
