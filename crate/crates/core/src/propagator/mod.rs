//! Propagator `Θ(τ) = exp(-H^D τ)` of the mode amplitudes.
//!
//! The spectral path diagonalizes `H^D = D 𝔚 D⁻¹` once and evaluates
//! `Θ(τ) = D exp(-𝔚τ) D⁻¹` for any number of times. Mirror-symmetric
//! generators are split into their even and odd blocks first so nearly
//! degenerate pairs across the blocks can never mix. The scaling-and-squaring
//! path (`theta_expm`) is the reference and the fallback near exceptional
//! points.

mod phase;

pub use phase::{phase_accurate_exp, reduced_phase, PHASE_LIMIT};

use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigen_general, expm, frobenius, norm1, symmetric_eigen, CMatrix, Lu, ZERO};
use crate::topology::DissipativeGenerator;

/// Residual above which the eigendecomposition is rejected.
pub const RESIDUAL_LIMIT: f64 = 1e-10;
/// Condition number of `D` above which the eigendecomposition is rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// `D`, eigenvectors in columns.
    pub right_vectors: CMatrix,
    /// `D⁻¹`.
    pub inverse_vectors: CMatrix,
    /// `‖D‖₁ ‖D⁻¹‖₁`.
    pub condition_estimate: f64,
    /// `‖D 𝔚 D⁻¹ - H^D‖_F / ‖H^D‖_F`.
    pub residual: f64,
}

impl SpectralDecomposition {
    /// `c_k = D_{mk} D⁻¹_{kn}` so that `Θ_{mn}(τ) = Σ_k c_k exp(-𝔚_k τ)`.
    pub fn modal_coefficients(&self, m: usize, n: usize) -> Vec<Complex64> {
        (0..self.eigenvalues.len())
            .map(|k| self.right_vectors[[m, k]] * self.inverse_vectors[[k, n]])
            .collect()
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Orthogonal change of basis to mirror-even then mirror-odd vectors.
pub fn mirror_basis(n: usize) -> Array2<f64> {
    let half = n / 2;
    let even = n - half;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut p = Array2::zeros((n, n));
    for k in 0..half {
        p[[k, k]] = r;
        p[[n - 1 - k, k]] = r;
        p[[k, even + k]] = r;
        p[[n - 1 - k, even + k]] = -r;
    }
    if n % 2 == 1 {
        p[[half, half]] = 1.0;
    }
    p
}

struct Block {
    values: Vec<Complex64>,
    vectors: CMatrix,
    inverse: CMatrix,
}

fn decompose_block(b: &CMatrix, ideal: bool) -> Result<Block> {
    if ideal {
        let h = b.mapv(|z| z.im);
        let e = symmetric_eigen(&h)?;
        let vectors = e.vectors.mapv(|x| Complex64::new(x, 0.0));
        let inverse = vectors.t().to_owned();
        let values = e.values.iter().map(|&r| Complex64::new(0.0, r)).collect();
        Ok(Block { values, vectors, inverse })
    } else {
        let e = eigen_general(b)?;
        let inverse = match Lu::factor(&e.vectors) {
            Ok(lu) => lu.inverse(),
            Err(_) => {
                return Err(Error::NearDefective {
                    residual: f64::INFINITY,
                    condition: f64::INFINITY,
                })
            }
        };
        Ok(Block {
            values: e.values,
            vectors: e.vectors,
            inverse,
        })
    }
}

pub fn decompose(g: &DissipativeGenerator) -> Result<SpectralDecomposition> {
    let a = g.matrix();
    let n = g.n();
    let ideal = g.is_ideal();
    let (values, d, dinv) = if n >= 2 && g.is_mirror_symmetric() {
        let p = mirror_basis(n).mapv(|x| Complex64::new(x, 0.0));
        let rotated = p.t().dot(a).dot(&p);
        let even = n - n / 2;
        let be = decompose_block(&rotated.slice(s![..even, ..even]).to_owned(), ideal)?;
        let bo = decompose_block(&rotated.slice(s![even.., even..]).to_owned(), ideal)?;
        let mut vec_blk = Array2::from_elem((n, n), ZERO);
        let mut inv_blk = Array2::from_elem((n, n), ZERO);
        vec_blk.slice_mut(s![..even, ..even]).assign(&be.vectors);
        vec_blk.slice_mut(s![even.., even..]).assign(&bo.vectors);
        inv_blk.slice_mut(s![..even, ..even]).assign(&be.inverse);
        inv_blk.slice_mut(s![even.., even..]).assign(&bo.inverse);
        let mut values = be.values;
        values.extend(bo.values);
        (values, p.dot(&vec_blk), inv_blk.dot(&p.t()))
    } else {
        let b = decompose_block(a, ideal)?;
        (b.values, b.vectors, b.inverse)
    };

    let scaled = Array2::from_shape_fn((n, n), |(i, k)| d[[i, k]] * values[k]);
    let back = scaled.dot(&dinv);
    let anorm = frobenius(a);
    let residual = if anorm > 0.0 {
        frobenius(&(&back - a)) / anorm
    } else {
        frobenius(&back)
    };
    let condition_estimate = norm1(&d) * norm1(&dinv);
    if !(residual <= RESIDUAL_LIMIT) || !(condition_estimate <= CONDITION_LIMIT) {
        return Err(Error::NearDefective {
            residual,
            condition: condition_estimate,
        });
    }
    Ok(SpectralDecomposition {
        eigenvalues: values,
        right_vectors: d,
        inverse_vectors: dinv,
        condition_estimate,
        residual,
    })
}

#[derive(Debug, Clone)]
pub struct Propagator {
    pub time: f64,
    pub matrix: CMatrix,
    /// False if any phase exceeded [`PHASE_LIMIT`].
    pub precise: bool,
}

/// `ζ = Θ β`.
pub fn evolve_amplitudes(theta: &Propagator, beta: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = &theta.matrix;
    if beta.len() != m.ncols() {
        return Err(Error::DimensionMismatch {
            what: "amplitude vector",
            expected: m.ncols(),
            got: beta.len(),
        });
    }
    Ok((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[[i, j]] * beta[j]).sum())
        .collect())
}

fn check_time(ideal: bool, tau: f64) -> Result<()> {
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {tau}")));
    }
    if tau < 0.0 && !ideal {
        return Err(Error::NegativeTime(tau));
    }
    Ok(())
}

/// `Θ(τ)` by scaling and squaring.
pub fn theta_expm(g: &DissipativeGenerator, tau: f64) -> Result<Propagator> {
    check_time(g.is_ideal(), tau)?;
    let a = g.matrix().mapv(|z| -z * tau);
    let precise = norm1(&a) <= PHASE_LIMIT;
    Ok(Propagator {
        time: tau,
        matrix: expm(&a),
        precise,
    })
}

/// `Θ(τ)` by the spectral path, falling back to scaling and squaring when
/// the generator is too close to defective.
pub fn theta_at(g: &DissipativeGenerator, tau: f64) -> Result<Propagator> {
    check_time(g.is_ideal(), tau)?;
    match Evolver::new(g) {
        Ok(ev) => ev.theta(tau),
        Err(Error::NearDefective { residual, condition }) => {
            log::warn!(
                "eigendecomposition rejected (residual {residual:.2e}, condition {condition:.2e}); using expm"
            );
            theta_expm(g, tau)
        }
        Err(e) => Err(e),
    }
}

/// Cached spectral data for repeated evaluation of `Θ(τ)`.
#[derive(Debug, Clone)]
pub struct Evolver {
    decomposition: SpectralDecomposition,
    ideal: bool,
}

impl Evolver {
    pub fn new(g: &DissipativeGenerator) -> Result<Self> {
        Ok(Self {
            decomposition: decompose(g)?,
            ideal: g.is_ideal(),
        })
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn n(&self) -> usize {
        self.decomposition.n()
    }

    pub fn is_ideal(&self) -> bool {
        self.ideal
    }

    /// `exp(-𝔚_k τ)` for every mode.
    pub fn modal_factors(&self, tau: f64) -> Result<(Vec<Complex64>, bool)> {
        check_time(self.ideal, tau)?;
        let mut precise = true;
        let f = self
            .decomposition
            .eigenvalues
            .iter()
            .map(|&w| {
                let (z, ok) = phase_accurate_exp(w, tau);
                precise &= ok;
                z
            })
            .collect();
        Ok((f, precise))
    }

    pub fn theta(&self, tau: f64) -> Result<Propagator> {
        let (f, precise) = self.modal_factors(tau)?;
        let d = &self.decomposition.right_vectors;
        let n = self.n();
        let scaled = Array2::from_shape_fn((n, n), |(i, k)| d[[i, k]] * f[k]);
        Ok(Propagator {
            time: tau,
            matrix: scaled.dot(&self.decomposition.inverse_vectors),
            precise,
        })
    }

    /// `Θ_{mn}(τ)`, zero-based indices.
    pub fn entry(&self, m: usize, n: usize, tau: f64) -> Result<(Complex64, bool)> {
        self.bounds(m)?;
        self.bounds(n)?;
        let (f, precise) = self.modal_factors(tau)?;
        let d = &self.decomposition;
        let z = (0..self.n())
            .map(|k| d.right_vectors[[m, k]] * f[k] * d.inverse_vectors[[k, n]])
            .sum();
        Ok((z, precise))
    }

    /// `β = Θ(τ) α`.
    pub fn evolve_amplitudes(&self, alpha: &[Complex64], tau: f64) -> Result<(Vec<Complex64>, bool)> {
        let n = self.n();
        if alpha.len() != n {
            return Err(Error::DimensionMismatch {
                what: "amplitude vector",
                expected: n,
                got: alpha.len(),
            });
        }
        let (f, precise) = self.modal_factors(tau)?;
        let d = &self.decomposition;
        let c: Vec<Complex64> = (0..n)
            .map(|k| f[k] * (0..n).map(|j| d.inverse_vectors[[k, j]] * alpha[j]).sum::<Complex64>())
            .collect();
        let beta = (0..n)
            .map(|i| (0..n).map(|k| d.right_vectors[[i, k]] * c[k]).sum())
            .collect();
        Ok((beta, precise))
    }

    fn bounds(&self, m: usize) -> Result<()> {
        if m >= self.n() {
            return Err(Error::InvalidParameter(format!(
                "mode index {} out of range 1..={}",
                m + 1,
                self.n()
            )));
        }
        Ok(())
    }
}
