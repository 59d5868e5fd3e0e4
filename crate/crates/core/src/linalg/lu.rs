use ndarray::Array2;
use num_complex::Complex64;

use super::{CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &CMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "LU of a non-square matrix",
                expected: n,
                got: a.ncols(),
            });
        }
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, f[[i, k]].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= f64::EPSILON * scale * n as f64 || pmax == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = f[[p, j]];
                    f[[p, j]] = f[[k, j]];
                    f[[k, j]] = t;
                }
            }
            let pivot = f[[k, k]];
            for i in k + 1..n {
                let m = f[[i, k]] / pivot;
                f[[i, k]] = m;
                if m != ZERO {
                    for j in k + 1..n {
                        let u = f[[k, j]];
                        f[[i, j]] -= m * u;
                    }
                }
            }
        }
        Ok(Self { factors: f, perm })
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.factors.nrows();
        let mut x = Array2::from_elem((n, b.ncols()), ZERO);
        for col in 0..b.ncols() {
            let mut y: Vec<Complex64> = (0..n).map(|i| b[[self.perm[i], col]]).collect();
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..i {
                    acc -= self.factors[[i, j]] * y[j];
                }
                y[i] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = y[i];
                for j in i + 1..n {
                    acc -= self.factors[[i, j]] * y[j];
                }
                y[i] = acc / self.factors[[i, i]];
            }
            for i in 0..n {
                x[[i, col]] = y[i];
            }
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.factors.nrows();
        let eye = Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { ZERO });
        self.solve(&eye)
    }
}
