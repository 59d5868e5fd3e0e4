//! Permutation targets and the `[Θ, H^D] = 0` transfer condition.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMatrix};
use crate::propagator::theta_at;
use crate::topology::DissipativeGenerator;

/// 0/1 permutation matrix the propagator should match in magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationTarget {
    matrix: Array2<u8>,
    /// Only the `(1,N)`/`(N,1)` corners and the rest of the first and last
    /// rows are constrained.
    pub corner_only: bool,
}

impl PermutationTarget {
    pub fn new(matrix: Array2<u8>, corner_only: bool) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                what: "permutation target must be square",
                expected: n,
                got: matrix.ncols(),
            });
        }
        if matrix.iter().any(|&x| x > 1) {
            return Err(Error::InvalidParameter("permutation target entries must be 0 or 1".into()));
        }
        let rows_ok = matrix.rows().into_iter().all(|r| r.iter().map(|&x| x as usize).sum::<usize>() == 1);
        let cols_ok = matrix.columns().into_iter().all(|c| c.iter().map(|&x| x as usize).sum::<usize>() == 1);
        if !rows_ok || !cols_ok {
            return Err(Error::InvalidParameter("permutation target needs exactly one 1 per row and column".into()));
        }
        if corner_only && (matrix[[0, n - 1]] != 1 || matrix[[n - 1, 0]] != 1) {
            return Err(Error::InvalidParameter("corner target must map 1 <-> N".into()));
        }
        Ok(Self { matrix, corner_only })
    }

    /// Full mirror permutation `m -> N+1-m`.
    pub fn anti_diagonal(n: usize) -> Self {
        let matrix = Array2::from_shape_fn((n, n), |(i, j)| (i + j == n - 1) as u8);
        Self {
            matrix,
            corner_only: false,
        }
    }

    /// Only sender and receiver exchanged.
    pub fn corner(n: usize) -> Self {
        Self {
            corner_only: true,
            ..Self::anti_diagonal(n)
        }
    }

    pub fn matrix(&self) -> &Array2<u8> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_complex(&self) -> CMatrix {
        self.matrix.mapv(|x| Complex64::new(x as f64, 0.0))
    }
}

/// `‖Θ H^D − H^D Θ‖_F / ‖H^D‖_F`.
pub fn commutator_residual(theta: &CMatrix, gen: &DissipativeGenerator) -> Result<f64> {
    let h = gen.matrix();
    if theta.nrows() != h.nrows() || theta.ncols() != h.ncols() {
        return Err(Error::DimensionMismatch {
            what: "commutator operands",
            expected: h.nrows(),
            got: theta.nrows(),
        });
    }
    let c = theta.dot(h) - h.dot(theta);
    let scale = frobenius(h);
    Ok(if scale > 0.0 { frobenius(&c) / scale } else { frobenius(&c) })
}

#[derive(Debug, Clone)]
pub struct PstCheck {
    pub passed: bool,
    /// `||Θ_mn| − P_mn|` on the constrained entries, zero elsewhere.
    pub deviations: Array2<f64>,
    pub max_deviation: f64,
}

pub fn check_pst_target(gen: &DissipativeGenerator, tau: f64, target: &PermutationTarget, tol: f64) -> Result<PstCheck> {
    let n = gen.n();
    if target.n() != n {
        return Err(Error::DimensionMismatch {
            what: "permutation target",
            expected: n,
            got: target.n(),
        });
    }
    if tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    let theta = theta_at(gen, tau)?.matrix;
    let p = target.matrix();
    let constrained = |i: usize| !target.corner_only || i == 0 || i == n - 1;
    let deviations = Array2::from_shape_fn((n, n), |(i, j)| {
        if constrained(i) {
            (theta[[i, j]].norm() - p[[i, j]] as f64).abs()
        } else {
            0.0
        }
    });
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(PstCheck {
        passed: max_deviation <= tol,
        deviations,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_chain, build_general, build_pst_chain, ChainSpec, NetworkTopology};
    use ndarray::array;

    #[test]
    fn target_validation() {
        assert!(PermutationTarget::new(array![[1, 0], [1, 0]], false).is_err());
        assert!(PermutationTarget::new(array![[2, 0], [0, 1]], false).is_err());
        assert!(PermutationTarget::new(array![[1, 0], [0, 1]], true).is_err());
        assert!(PermutationTarget::new(array![[0, 1], [1, 0]], true).is_ok());
        assert_eq!(PermutationTarget::anti_diagonal(3).matrix()[[2, 0]], 1);
    }

    #[test]
    fn commutator_of_own_propagator() {
        let spec = ChainSpec {
            n: 5,
            omega_end: 1.0,
            omega_mid: 4.0,
            lambda_end: 1.0,
            epsilon: 2.0,
            gamma_mid: 0.1,
        };
        let g = build_general(&build_chain(&spec).unwrap());
        let th = theta_at(&g, 3.3).unwrap().matrix;
        assert!(commutator_residual(&th, &g).unwrap() <= 1e-9);
    }

    #[test]
    fn mirror_chain_commutes_with_reflection() {
        let spec = ChainSpec {
            n: 6,
            omega_end: 1.0,
            omega_mid: 7.0,
            lambda_end: 1.0,
            epsilon: 3.0,
            gamma_mid: 0.2,
        };
        let g = build_general(&build_chain(&spec).unwrap());
        let j = PermutationTarget::anti_diagonal(6).to_complex();
        assert!(commutator_residual(&j, &g).unwrap() <= 1e-12);
    }

    #[test]
    fn detuned_ends_break_reflection() {
        let t = NetworkTopology::ideal(vec![1.0, 2.0, 1.5], array![[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        let g = build_general(&t);
        let j = PermutationTarget::anti_diagonal(3).to_complex();
        assert!(commutator_residual(&j, &g).unwrap() > 0.1);
    }

    #[test]
    fn pst_chain_hits_target() {
        let g = build_general(&build_pst_chain(4, 1.0, 0.0).unwrap());
        let full = PermutationTarget::anti_diagonal(4);
        let ok = check_pst_target(&g, std::f64::consts::FRAC_PI_2, &full, 1e-8).unwrap();
        assert!(ok.passed, "{}", ok.max_deviation);
        let at_zero = check_pst_target(&g, 0.0, &PermutationTarget::corner(4), 1e-8).unwrap();
        assert!(!at_zero.passed);
        assert!((at_zero.deviations[[3, 0]] - 1.0).abs() < 1e-15);
    }
}
