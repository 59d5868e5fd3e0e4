//! Network topologies and the dissipative generator `H^D = iH + Γ/2`.
//!
//! Frequencies, couplings and damping rates are plain numbers in whatever
//! unit the caller picks; [`ChainSpec::scaled`] rescales a chain so the end
//! coupling is the unit (time then reads as `τ = λt`).

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, CMatrix};

/// Frequencies, symmetric couplings and symmetric damping matrix of an
/// `n`-oscillator network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    omega: Vec<f64>,
    lambda: Array2<f64>,
    gamma: Array2<f64>,
}

impl NetworkTopology {
    pub fn new(omega: Vec<f64>, lambda: Array2<f64>, gamma: Array2<f64>) -> Result<Self> {
        let n = omega.len();
        if n < 2 {
            return Err(Error::InvalidTopology(format!("need at least 2 oscillators, got {n}")));
        }
        for (what, m) in [("coupling matrix", &lambda), ("damping matrix", &gamma)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    got: if m.nrows() != n { m.nrows() } else { m.ncols() },
                });
            }
        }
        let all_finite = omega.iter().chain(lambda.iter()).chain(gamma.iter()).all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::InvalidTopology("non-finite entry".into()));
        }
        for m in 0..n {
            if lambda[[m, m]] != 0.0 {
                return Err(Error::InvalidTopology(format!("coupling diagonal ({m},{m}) must be zero")));
            }
            for k in 0..m {
                if lambda[[m, k]] != lambda[[k, m]] {
                    return Err(Error::InvalidTopology(format!("coupling matrix not symmetric at ({k},{m})")));
                }
                if gamma[[m, k]] != gamma[[k, m]] {
                    return Err(Error::InvalidTopology(format!("damping matrix not symmetric at ({k},{m})")));
                }
            }
        }
        let scale = gamma.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if scale > 0.0 {
            let min_eig = symmetric_eigen(&gamma)?.values[0];
            if min_eig < -1e-12 * scale {
                return Err(Error::InvalidTopology(format!(
                    "damping matrix is not positive semidefinite (smallest eigenvalue {min_eig:.3e})"
                )));
            }
        }
        Ok(Self { omega, lambda, gamma })
    }

    /// Undamped topology from frequencies and couplings.
    pub fn ideal(omega: Vec<f64>, lambda: Array2<f64>) -> Result<Self> {
        let n = omega.len();
        Self::new(omega, lambda, Array2::zeros((n, n)))
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn lambda(&self) -> &Array2<f64> {
        &self.lambda
    }

    pub fn gamma(&self) -> &Array2<f64> {
        &self.gamma
    }

    pub fn is_ideal(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0.0)
    }

    pub fn is_gamma_diagonal(&self) -> bool {
        self.gamma.indexed_iter().all(|((i, j), &g)| i == j || g == 0.0)
    }

    /// Real symmetric `H` with frequencies on the diagonal.
    pub fn hamiltonian(&self) -> Array2<f64> {
        let n = self.n();
        Array2::from_shape_fn((n, n), |(i, j)| if i == j { self.omega[i] } else { self.lambda[[i, j]] })
    }

    /// Same frequencies and couplings with a new damping matrix.
    pub fn with_gamma(&self, gamma: Array2<f64>) -> Result<Self> {
        Self::new(self.omega.clone(), self.lambda.clone(), gamma)
    }

    /// Nearest-neighbour bond strengths `λ_{m,m+1}`.
    pub fn bonds(&self) -> Vec<f64> {
        (0..self.n() - 1).map(|m| self.lambda[[m, m + 1]]).collect()
    }
}

/// Sender / transmitter / receiver chain: ends at `omega_end` coupled with
/// `lambda_end`, transmitters at `omega_mid` coupled with
/// `epsilon * lambda_end` and damped at `gamma_mid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n: usize,
    pub omega_end: f64,
    pub omega_mid: f64,
    pub lambda_end: f64,
    pub epsilon: f64,
    pub gamma_mid: f64,
}

impl ChainSpec {
    /// Rescales frequencies and damping by `lambda_end` so the end coupling is 1.
    pub fn scaled(&self) -> Result<Self> {
        if !(self.lambda_end > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda_end must be positive to rescale, got {}",
                self.lambda_end
            )));
        }
        let l = self.lambda_end;
        Ok(Self {
            omega_end: self.omega_end / l,
            omega_mid: self.omega_mid / l,
            gamma_mid: self.gamma_mid / l,
            lambda_end: 1.0,
            ..*self
        })
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidTopology(format!("chain needs n >= 2, got {}", self.n)));
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.gamma_mid < 0.0 {
            return Err(Error::InvalidParameter(format!("transmitter damping must be >= 0, got {}", self.gamma_mid)));
        }
        Ok(())
    }
}

/// Default threshold for the "≪ 1" regime checks.
pub const DEFAULT_REGIME_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeFlags {
    /// μ ≪ 1
    pub mu_small: bool,
    /// η ≪ 1
    pub eta_small: bool,
    /// (εμ)² ≪ 1
    pub eps_mu_sq_small: bool,
}

/// Dimensionless tunneling parameters of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledParams {
    /// λ / Δ₋
    pub mu: f64,
    /// Γ / λ
    pub eta: f64,
    /// ω / λ
    pub varpi: f64,
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub flags: RegimeFlags,
}

impl ScaledParams {
    /// Parameters given directly in scaled units (λ = 1).
    pub fn from_scaled(mu: f64, eta: f64, varpi: f64, epsilon: f64) -> Self {
        let delta_minus = 1.0 / mu;
        Self {
            mu,
            eta,
            varpi,
            delta_minus,
            delta_plus: 2.0 * varpi + delta_minus,
            flags: regime_flags(mu, eta, epsilon, DEFAULT_REGIME_THRESHOLD),
        }
    }

    /// The chain spec (λ = 1) these parameters describe.
    pub fn chain(&self, n: usize, epsilon: f64) -> ChainSpec {
        ChainSpec {
            n,
            omega_end: self.varpi,
            omega_mid: self.varpi + self.delta_minus,
            lambda_end: 1.0,
            epsilon,
            gamma_mid: self.eta,
        }
    }
}

fn regime_flags(mu: f64, eta: f64, epsilon: f64, threshold: f64) -> RegimeFlags {
    RegimeFlags {
        mu_small: mu.abs() < threshold,
        eta_small: eta.abs() < threshold,
        eps_mu_sq_small: (epsilon * mu).powi(2) < threshold,
    }
}

/// `H^D` together with the pieces the propagator needs.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipativeGenerator {
    matrix: CMatrix,
    hermitian_part_ideal: bool,
    hamiltonian: Option<Array2<f64>>,
}

impl DissipativeGenerator {
    /// Wraps an arbitrary complex generator, e.g. one near an exceptional point.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "generator must be square",
                expected: n,
                got: matrix.ncols(),
            });
        }
        let ideal = matrix.indexed_iter().all(|((i, j), z)| z.re == 0.0 && z.im == matrix[[j, i]].im);
        let hamiltonian = ideal.then(|| matrix.mapv(|z| z.im));
        Ok(Self {
            matrix,
            hermitian_part_ideal: ideal,
            hamiltonian,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// True when there is no damping, i.e. `H^D = iH` is anti-Hermitian.
    pub fn is_ideal(&self) -> bool {
        self.hermitian_part_ideal
    }

    /// Real `H` when the generator is ideal.
    pub fn hamiltonian(&self) -> Option<&Array2<f64>> {
        self.hamiltonian.as_ref()
    }

    /// `(H^D)_{mn} == (H^D)_{N-1-m, N-1-n}` for every entry.
    pub fn is_mirror_symmetric(&self) -> bool {
        let n = self.n();
        let scale = self.matrix.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        self.matrix
            .indexed_iter()
            .all(|((i, j), z)| (z - self.matrix[[n - 1 - i, n - 1 - j]]).norm() <= 4.0 * f64::EPSILON * scale)
    }
}

pub fn build_general(topology: &NetworkTopology) -> DissipativeGenerator {
    let n = topology.n();
    let h = topology.hamiltonian();
    let matrix = Array2::from_shape_fn((n, n), |(i, j)| Complex64::new(topology.gamma[[i, j]] / 2.0, h[[i, j]]));
    let ideal = topology.is_ideal();
    DissipativeGenerator {
        matrix,
        hermitian_part_ideal: ideal,
        hamiltonian: ideal.then_some(h),
    }
}

pub fn build_chain(spec: &ChainSpec) -> Result<NetworkTopology> {
    spec.validate()?;
    let n = spec.n;
    if n == 2 && (spec.epsilon != 0.0 || spec.gamma_mid != 0.0) {
        log::warn!("two-oscillator chain has no transmitters; epsilon, omega_mid and gamma_mid are ignored");
    }
    let omega = (0..n)
        .map(|m| if m == 0 || m == n - 1 { spec.omega_end } else { spec.omega_mid })
        .collect();
    let mut lambda = Array2::zeros((n, n));
    for m in 0..n - 1 {
        let bond = if m == 0 || m == n - 2 {
            spec.lambda_end
        } else {
            spec.epsilon * spec.lambda_end
        };
        lambda[[m, m + 1]] = bond;
        lambda[[m + 1, m]] = bond;
    }
    let mut gamma = Array2::zeros((n, n));
    for m in 1..n - 1 {
        gamma[[m, m]] = spec.gamma_mid;
    }
    NetworkTopology::new(omega, lambda, gamma)
}

/// Uniform frequency chain with bonds `λ √(m (N − m))`, m = 1..N−1.
pub fn build_pst_chain(n: usize, lambda: f64, omega: f64) -> Result<NetworkTopology> {
    if n < 2 {
        return Err(Error::InvalidTopology(format!("chain needs n >= 2, got {n}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let mut couplings = Array2::zeros((n, n));
    for m in 1..n {
        let bond = lambda * ((m * (n - m)) as f64).sqrt();
        couplings[[m - 1, m]] = bond;
        couplings[[m, m - 1]] = bond;
    }
    NetworkTopology::ideal(vec![omega; n], couplings)
}

pub fn scaled_params(spec: &ChainSpec) -> Result<ScaledParams> {
    scaled_params_with(spec, DEFAULT_REGIME_THRESHOLD)
}

pub fn scaled_params_with(spec: &ChainSpec, threshold: f64) -> Result<ScaledParams> {
    let delta_minus = spec.omega_mid - spec.omega_end;
    if delta_minus == 0.0 {
        return Err(Error::InvalidParameter(
            "transmitters resonant with the ends (Δ₋ = 0): tunneling parameters undefined".into(),
        ));
    }
    if !(spec.lambda_end > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda_end must be positive, got {}", spec.lambda_end)));
    }
    let mu = spec.lambda_end / delta_minus;
    let eta = spec.gamma_mid / spec.lambda_end;
    Ok(ScaledParams {
        mu,
        eta,
        varpi: spec.omega_end / spec.lambda_end,
        delta_minus,
        delta_plus: spec.omega_mid + spec.omega_end,
        flags: regime_flags(mu, eta, spec.epsilon, threshold),
    })
}
