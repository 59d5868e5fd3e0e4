use ndarray::Array2;

use crate::error::{Error, Result};

/// Eigensystem of a real symmetric matrix: `A = V diag(values) Vᵀ`,
/// eigenvectors in the columns of `vectors`, values ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations until every off-diagonal entry is negligible
/// against both of its pivots.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

    // below this an entry moves no eigenvalue by more than rounding of ‖A‖
    let floor = f64::EPSILON * scale / n.max(1) as f64;
    let mut converged = n < 2;
    for sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum::<f64>()
            .sqrt();
        if off == 0.0 || off <= f64::MIN_POSITIVE * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[[p, q]];
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                // drop entries at rounding level of the pivots or of ‖A‖
                let g = 100.0 * apq.abs();
                let tiny = apq.abs() <= f64::EPSILON * (app * aqq).abs().sqrt() || apq.abs() <= floor;
                if apq == 0.0 || tiny || (sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs()) {
                    m[[p, q]] = 0.0;
                    m[[q, p]] = 0.0;
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    // θ² would overflow
                    apq / h
                } else {
                    let theta = h / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta == 0.0 { 1.0 } else { t }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].total_cmp(&m[[j, j]]));
    let values = order.iter().map(|&i| m[[i, i]]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    Ok(SymmetricEigen { values, vectors })
}
