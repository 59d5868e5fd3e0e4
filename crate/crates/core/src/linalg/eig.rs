//! Eigensystem of a general complex matrix.
//!
//! Householder reduction to upper Hessenberg form, then implicit
//! single-shift QR sweeps (Wilkinson shift, Givens bulge chase) down to a
//! complex Schur form `A = Q T Q^H`. Eigenvectors come from back
//! substitution on `T` and are mapped back through `Q`.

use ndarray::Array2;
use num_complex::Complex64;

use super::{CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GeneralEigen {
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors, one per column.
    pub vectors: CMatrix,
}

const MAX_ITER_PER_VALUE: usize = 60;

pub fn eigen_general(a: &CMatrix) -> Result<GeneralEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "eigen of a non-square matrix",
            expected: n,
            got: a.ncols(),
        });
    }
    if n == 0 {
        return Ok(GeneralEigen {
            values: vec![],
            vectors: Array2::from_elem((0, 0), ZERO),
        });
    }
    let (mut h, mut q) = hessenberg(a);
    schur(&mut h, &mut q)?;
    let vectors = triangular_eigenvectors(&h, &q);
    let values = (0..n).map(|i| h[[i, i]]).collect();
    Ok(GeneralEigen { values, vectors })
}

fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = super::identity(n);
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n).map(|i| h[[i, k]].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[[k + 1, k]];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        // v = x + phase*|x| e1, reflector P = I - 2 v v^H / (v^H v)
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[[i, k]]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- P H
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * h[[k + 1 + t, j]]).sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vt) in v.iter().enumerate() {
                h[[k + 1 + t, j]] -= vt * f;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: Complex64 = v.iter().enumerate().map(|(t, vt)| m[[i, k + 1 + t]] * vt).sum();
                let f = dot * (2.0 / vnorm2);
                for (t, vt) in v.iter().enumerate() {
                    m[[i, k + 1 + t]] -= f * vt.conj();
                }
            }
        }
        for i in k + 2..n {
            h[[i, k]] = ZERO;
        }
    }
    (h, q)
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn schur(h: &mut CMatrix, q: &mut CMatrix) -> Result<()> {
    let n = h.nrows();
    let eps = f64::EPSILON;
    let hnorm = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // Locate the active block [lo, hi].
        let mut lo = hi;
        while lo > 0 {
            let s = h[[lo - 1, lo - 1]].norm() + h[[lo, lo]].norm();
            let s = if s == 0.0 { hnorm } else { s };
            if h[[lo, lo - 1]].norm() <= eps * s {
                h[[lo, lo - 1]] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > MAX_ITER_PER_VALUE * n {
            return Err(Error::NoConvergence(total));
        }

        let a = h[[hi - 1, hi - 1]];
        let b = h[[hi - 1, hi]];
        let c = h[[hi, hi - 1]];
        let d = h[[hi, hi]];
        let shift = if iter % 11 == 10 {
            // exceptional shift to break cycles
            d + Complex64::new(h[[hi, hi - 1]].norm() * 0.75, 0.0)
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = d + half + disc;
            let m2 = d + half - disc;
            // keep the root of the trailing 2x2 nearest d
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };

        let mut x = h[[lo, lo]] - shift;
        let mut y = h[[lo + 1, lo]];
        for k in lo..hi {
            let (cr, s) = givens(x, y);
            // rows k, k+1
            let col_start = if k > lo { k - 1 } else { k };
            for j in col_start..n {
                let u = h[[k, j]];
                let w = h[[k + 1, j]];
                h[[k, j]] = u * cr + s * w;
                h[[k + 1, j]] = -s.conj() * u + w * cr;
            }
            // columns k, k+1
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let u = h[[i, k]];
                let w = h[[i, k + 1]];
                h[[i, k]] = u * cr + w * s.conj();
                h[[i, k + 1]] = -u * s + w * cr;
            }
            for i in 0..n {
                let u = q[[i, k]];
                let w = q[[i, k + 1]];
                q[[i, k]] = u * cr + w * s.conj();
                q[[i, k + 1]] = -u * s + w * cr;
            }
            if k > lo {
                h[[k + 1, k - 1]] = ZERO;
            }
            if k + 1 < hi {
                x = h[[k + 1, k]];
                y = h[[k + 2, k]];
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[[i, j]] = ZERO;
        }
    }
    Ok(())
}

fn triangular_eigenvectors(t: &CMatrix, q: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let tnorm = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut y = Array2::from_elem((n, n), ZERO);
    for k in 0..n {
        let lam = t[[k, k]];
        y[[k, k]] = ONE;
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in i + 1..=k {
                acc += t[[i, j]] * y[[j, k]];
            }
            let mut den = t[[i, i]] - lam;
            if den.norm() < small {
                den = Complex64::new(small, 0.0);
            }
            y[[i, k]] = -acc / den;
        }
    }
    let mut v = q.dot(&y);
    for k in 0..n {
        let norm = v.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.column_mut(k).mapv_inplace(|z| z / norm);
        }
    }
    v
}
