//! Dense linear algebra used by the propagator layer.
//!
//! Matrices are `ndarray` containers of `Complex64`; the factorizations
//! themselves are written here so their numerical behavior is under our
//! control (deflation thresholds, residual checks, conditioning).

mod eig;
mod expm;
mod jacobi;
mod lu;
mod sum;

pub use eig::{eigen_general, GeneralEigen};
pub use expm::expm;
pub use jacobi::{symmetric_eigen, SymmetricEigen};
pub use lu::Lu;
pub use sum::{CompensatedSum, ComplexCompensatedSum};

use ndarray::Array2;
use num_complex::Complex64;

pub type CMatrix = Array2<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMatrix {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { ZERO })
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum absolute column sum.
pub fn norm1(a: &CMatrix) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b)
}

/// Largest singular value, from the real symmetric embedding of `A^H A`.
pub fn largest_singular_value(a: &CMatrix) -> f64 {
    let gram = adjoint(a).dot(a);
    let n = gram.nrows();
    let embed = Array2::from_shape_fn((2 * n, 2 * n), |(i, j)| {
        // symmetrize away the rounding in A^H A
        let z = 0.5 * (gram[[i % n, j % n]] + gram[[j % n, i % n]].conj());
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = symmetric_eigen(&embed).expect("Jacobi on a Gram matrix converges");
    eig.values
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .max(0.0)
        .sqrt()
}
