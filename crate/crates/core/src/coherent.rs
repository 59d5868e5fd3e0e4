//! Superpositions of multimode coherent states and their closed-form
//! evolution under a linear propagator.
//!
//! A pure superposition `𝒩 Σ_r Λ_r |{β^r}⟩` evolves into the mixed state
//! `𝒩² Σ_{rs} Λ_r Λ_s* ⟨{β^s}|{β^r}⟩/⟨{ζ^s}|{ζ^r}⟩ |{ζ^r}⟩⟨{ζ^s}|` with
//! `ζ^r = Θ β^r`. Every weight is carried as a complex logarithm so factors
//! like `e^{-50}` in numerator and denominator cancel before exponentiation.
//!
//! Mode indices in this module are 1-based.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexCompensatedSum;
use crate::propagator::{evolve_amplitudes, Evolver, Propagator};

/// Imaginary residue above which a trace is rejected.
pub const IMAGINARY_LIMIT: f64 = 1e-8;

/// `ln ⟨a|b⟩ = Σ_m -|a_m|²/2 - |b_m|²/2 + a_m* b_m`.
pub fn log_overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| -0.5 * x.norm_sqr() - 0.5 * y.norm_sqr() + x.conj() * y)
        .sum()
}

#[inline]
fn log_overlap1(a: Complex64, b: Complex64) -> Complex64 {
    -0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b
}

/// `⟨{a}|{b}⟩` for two multimode coherent states.
pub fn multimode_overlap(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "coherent amplitude vectors",
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(log_overlap(a, b).exp())
}

fn ln(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        Complex64::new(f64::NEG_INFINITY, 0.0)
    } else {
        z.ln()
    }
}

fn check_mode(mode: usize, n: usize) -> Result<usize> {
    if mode == 0 || mode > n {
        return Err(Error::InvalidParameter(format!("mode {mode} out of range 1..={n}")));
    }
    Ok(mode - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub amplitude: Complex64,
    pub beta: Vec<Complex64>,
}

/// `𝒩 Σ_r Λ_r |{β^r}⟩` with `𝒩` fixed by unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentSuperposition {
    branches: Vec<Branch>,
    norm_sq: f64,
}

impl CoherentSuperposition {
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let n = match branches.first() {
            Some(b) => b.beta.len(),
            None => return Err(Error::InvalidParameter("superposition needs at least one branch".into())),
        };
        if n == 0 {
            return Err(Error::InvalidParameter("superposition needs at least one mode".into()));
        }
        for b in &branches {
            if b.beta.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "branch amplitude vector",
                    expected: n,
                    got: b.beta.len(),
                });
            }
        }
        let mut acc = ComplexCompensatedSum::default();
        for r in &branches {
            for s in &branches {
                acc.add(r.amplitude * s.amplitude.conj() * log_overlap(&s.beta, &r.beta).exp());
            }
        }
        let total = acc.value();
        if !(total.re > 0.0) || !total.re.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "superposition has non-positive norm {:.3e}",
                total.re
            )));
        }
        Ok(Self {
            branches,
            norm_sq: 1.0 / total.re,
        })
    }

    /// A single coherent state `|{β}⟩`.
    pub fn coherent(beta: Vec<Complex64>) -> Result<Self> {
        Self::new(vec![Branch {
            amplitude: Complex64::new(1.0, 0.0),
            beta,
        }])
    }

    pub fn vacuum(n: usize) -> Result<Self> {
        Self::coherent(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn n(&self) -> usize {
        self.branches[0].beta.len()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// `𝒩²`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// The unevolved state in density-operator form.
    pub fn at_rest(&self) -> EvolvedState {
        EvolvedState {
            zeta: self.branches.iter().map(|b| b.beta.clone()).collect(),
            initial: self.clone(),
            time: 0.0,
            precise: true,
        }
    }

    /// Same superposition with mode `m` moved to position `perm[m]` (0-based).
    pub fn permuted_modes(&self, perm: &[usize]) -> Result<Self> {
        let branches = self
            .branches
            .iter()
            .map(|b| {
                Ok(Branch {
                    amplitude: b.amplitude,
                    beta: permute(&b.beta, perm)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            branches,
            norm_sq: self.norm_sq,
        })
    }
}

fn permute(v: &[Complex64], perm: &[usize]) -> Result<Vec<Complex64>> {
    let n = v.len();
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            what: "mode permutation",
            expected: n,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, &p) in perm.iter().enumerate() {
        if p >= n || seen[p] {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
        out[p] = v[m];
    }
    Ok(out)
}

/// `𝒩(|α⟩_mode + |-α⟩_mode)` with every other mode in `|transmitter_beta⟩`.
pub fn make_cat(n: usize, mode: usize, alpha: Complex64, transmitter_beta: Complex64) -> Result<CoherentSuperposition> {
    let idx = check_mode(mode, n)?;
    let branch = |sign: f64| {
        let mut beta = vec![transmitter_beta; n];
        beta[idx] = alpha * sign;
        Branch {
            amplitude: Complex64::new(1.0, 0.0),
            beta,
        }
    };
    CoherentSuperposition::new(vec![branch(1.0), branch(-1.0)])
}

/// Superposition after evolution: original `β^r` and evolved `ζ^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    initial: CoherentSuperposition,
    zeta: Vec<Vec<Complex64>>,
    pub time: f64,
    /// False if the propagator lost phase precision.
    pub precise: bool,
}

impl EvolvedState {
    pub fn initial(&self) -> &CoherentSuperposition {
        &self.initial
    }

    pub fn zeta(&self) -> &[Vec<Complex64>] {
        &self.zeta
    }

    pub fn n(&self) -> usize {
        self.initial.n()
    }

    /// `ln w_rs` with `w_rs = 𝒩² Λ_r Λ_s* ⟨{β^s}|{β^r}⟩ / D_rs`, where
    /// `ln D_rs` is provided by `denominator`.
    fn log_weights(&self, denominator: impl Fn(usize, usize) -> Complex64) -> Array2<Complex64> {
        let b = &self.initial.branches;
        let q = b.len();
        let ln_norm = self.initial.norm_sq.ln();
        Array2::from_shape_fn((q, q), |(r, s)| {
            ln_norm + ln(b[r].amplitude) + ln(b[s].amplitude.conj()) + log_overlap(&b[s].beta, &b[r].beta)
                - denominator(r, s)
        })
    }

    /// Weights of `|{ζ^r}⟩⟨{ζ^s}|`, in log form.
    pub fn network_log_weights(&self) -> Array2<Complex64> {
        self.log_weights(|r, s| log_overlap(&self.zeta[s], &self.zeta[r]))
    }

    /// `Σ_rs w_rs ⟨{ζ^s}|{ζ^r}⟩`, which is 1 for a valid state.
    pub fn trace(&self) -> f64 {
        let w = self.network_log_weights();
        let mut acc = ComplexCompensatedSum::default();
        for ((r, s), lw) in w.indexed_iter() {
            acc.add((lw + log_overlap(&self.zeta[s], &self.zeta[r])).exp());
        }
        acc.value().re
    }

    /// Same state with every evolved amplitude multiplied by `e^{iφ}`.
    pub fn rotated(&self, phi: f64) -> Self {
        let f = Complex64::from_polar(1.0, phi);
        Self {
            zeta: self.zeta.iter().map(|z| z.iter().map(|x| x * f).collect()).collect(),
            ..self.clone()
        }
    }

    /// Same state with mode `m` moved to position `perm[m]` (0-based).
    pub fn permuted_modes(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self {
            initial: self.initial.permuted_modes(perm)?,
            zeta: self.zeta.iter().map(|z| permute(z, perm)).collect::<Result<_>>()?,
            time: self.time,
            precise: self.precise,
        })
    }
}

pub fn evolve(state: &CoherentSuperposition, theta: &Propagator) -> Result<EvolvedState> {
    let n = state.n();
    if theta.matrix.nrows() != n || theta.matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "propagator size",
            expected: n,
            got: theta.matrix.nrows(),
        });
    }
    Ok(EvolvedState {
        zeta: state
            .branches
            .iter()
            .map(|b| evolve_amplitudes(theta, &b.beta))
            .collect::<Result<_>>()?,
        initial: state.clone(),
        time: theta.time,
        precise: theta.precise,
    })
}

/// [`evolve`] through cached spectral data, without forming `Θ`.
pub fn evolve_with(state: &CoherentSuperposition, evolver: &Evolver, tau: f64) -> Result<EvolvedState> {
    let mut precise = true;
    let zeta = state
        .branches
        .iter()
        .map(|b| {
            let (z, ok) = evolver.evolve_amplitudes(&b.beta, tau)?;
            precise &= ok;
            Ok(z)
        })
        .collect::<Result<_>>()?;
    Ok(EvolvedState {
        initial: state.clone(),
        zeta,
        time: tau,
        precise,
    })
}

/// Single-mode state `Σ_rs w_rs |ζ_m^r⟩⟨ζ_m^s|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub mode: usize,
    pub amplitudes: Vec<Complex64>,
    /// `ln w_rs`.
    pub log_weights: Array2<Complex64>,
    pub precise: bool,
}

impl ReducedState {
    pub fn weights(&self) -> Array2<Complex64> {
        self.log_weights.mapv(|z| z.exp())
    }

    pub fn trace(&self) -> f64 {
        let mut acc = ComplexCompensatedSum::default();
        for ((r, s), lw) in self.log_weights.indexed_iter() {
            acc.add((lw + log_overlap1(self.amplitudes[s], self.amplitudes[r])).exp());
        }
        acc.value().re
    }
}

pub fn reduce(state: &EvolvedState, mode: usize) -> Result<ReducedState> {
    let m = check_mode(mode, state.n())?;
    let amplitudes: Vec<Complex64> = state.zeta.iter().map(|z| z[m]).collect();
    let log_weights = state.log_weights(|r, s| log_overlap1(amplitudes[s], amplitudes[r]));
    Ok(ReducedState {
        mode,
        amplitudes,
        log_weights,
        precise: state.precise,
    })
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_LIMIT {
        return Err(Error::NumericalConsistency(z.im.abs()));
    }
    Ok(z.re)
}

/// `Tr[ρ_a ρ_b]` for two single-mode states.
pub fn reduced_overlap(a: &ReducedState, b: &ReducedState) -> Result<f64> {
    let mut acc = ComplexCompensatedSum::default();
    for ((r, s), wa) in a.log_weights.indexed_iter() {
        let u = a.amplitudes[r];
        let v = a.amplitudes[s];
        for ((rp, sp), wb) in b.log_weights.indexed_iter() {
            let x = b.amplitudes[rp];
            let y = b.amplitudes[sp];
            acc.add((wa + wb + log_overlap1(v, x) + log_overlap1(y, u)).exp());
        }
    }
    real_part(acc.value())
}

/// `Tr[ρ_a ρ_b]` for two network states.
pub fn network_overlap(a: &EvolvedState, b: &EvolvedState) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            what: "network overlap",
            expected: a.n(),
            got: b.n(),
        });
    }
    let wa = a.network_log_weights();
    let wb = b.network_log_weights();
    let mut acc = ComplexCompensatedSum::default();
    for ((r, s), la) in wa.indexed_iter() {
        for ((rp, sp), lb) in wb.indexed_iter() {
            let t = la + lb + log_overlap(&a.zeta[s], &b.zeta[rp]) + log_overlap(&b.zeta[sp], &a.zeta[r]);
            acc.add(t.exp());
        }
    }
    real_part(acc.value())
}

/// `Tr[ρ(0) ρ(τ)]` over the whole network.
pub fn network_fidelity(state: &EvolvedState) -> Result<f64> {
    network_overlap(&state.initial.at_rest(), state)
}

/// Transfer probability between the sender's initial state and the
/// receiver's evolved state in the closed form
/// `𝒩⁴ Σ Λ_r Λ_s* Λ_r' Λ_s'* ⟨β^s|β^r⟩⟨β^s'|β^r'⟩ exp{-(ζ_R^s' - β_S^s)*(ζ_R^r' - β_S^r)}`.
pub fn transfer_probability_explicit(state: &EvolvedState, sender: usize, receiver: usize) -> Result<f64> {
    let n = state.n();
    let si = check_mode(sender, n)?;
    let ri = check_mode(receiver, n)?;
    let b = &state.initial.branches;
    let q = b.len();
    let lw = Array2::from_shape_fn((q, q), |(r, s)| {
        ln(b[r].amplitude) + ln(b[s].amplitude.conj()) + log_overlap(&b[s].beta, &b[r].beta)
    });
    let ln_norm = 2.0 * state.initial.norm_sq.ln();
    let mut acc = ComplexCompensatedSum::default();
    for ((r, s), w) in lw.indexed_iter() {
        for ((rp, sp), wp) in lw.indexed_iter() {
            let d1 = state.zeta[sp][ri] - b[s].beta[si];
            let d2 = state.zeta[rp][ri] - b[r].beta[si];
            acc.add((ln_norm + w + wp - d1.conj() * d2).exp());
        }
    }
    real_part(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::propagator::theta_at;
    use crate::topology::{build_general, NetworkTopology};
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn still(state: &CoherentSuperposition) -> EvolvedState {
        let p = Propagator {
            time: 0.0,
            matrix: identity(state.n()),
            precise: true,
        };
        evolve(state, &p).unwrap()
    }

    #[test]
    fn overlap_identities() {
        let a = vec![c(0.3, -1.2), c(2.0, 0.5)];
        assert!((multimode_overlap(&a, &a).unwrap() - 1.0).norm() < 1e-15);
        let al = c(1.1, 0.4);
        let z = multimode_overlap(&[al], &[-al]).unwrap();
        assert!((z - (-2.0 * al.norm_sqr()).exp()).norm() < 1e-15);
        let z = multimode_overlap(&[al, c(0.0, 0.0)], &[c(0.0, 0.0), al]).unwrap();
        assert!((z - (-al.norm_sqr()).exp()).norm() < 1e-15);
        assert!(multimode_overlap(&a, &a[..1]).is_err());
    }

    #[test]
    fn cat_normalization() {
        let cat = make_cat(3, 1, c(5.0, 0.0), c(0.0, 0.0)).unwrap();
        let want = 1.0 / (2.0 * (1.0 + (-50f64).exp()));
        assert!((cat.norm_sq() - want).abs() < 1e-15);
        let flat = make_cat(2, 1, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((flat.norm_sq() - 0.25).abs() < 1e-15);
        assert!((still(&flat).trace() - 1.0).abs() < 1e-14);
        let rho = reduce(&still(&flat), 1).unwrap();
        let vac = reduce(&still(&CoherentSuperposition::vacuum(2).unwrap()), 1).unwrap();
        assert!((reduced_overlap(&rho, &vac).unwrap() - 1.0).abs() < 1e-14);
        assert!(make_cat(3, 0, c(1.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(make_cat(3, 4, c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn transmitters_share_entries() {
        let cat = make_cat(4, 1, c(5.0, 0.0), c(5.0, 0.0)).unwrap();
        let [a, b] = cat.branches() else { panic!() };
        assert_eq!(a.beta[1..], b.beta[1..]);
        assert_eq!(a.beta[1], c(5.0, 0.0));
        assert_eq!(a.beta[0], -b.beta[0]);
        let want = 1.0 / (2.0 * (1.0 + (-50f64).exp()));
        assert!((cat.norm_sq() - want).abs() < 1e-15);
    }

    #[test]
    fn reduced_states_at_rest() {
        let cat = make_cat(3, 1, c(1.3, 0.2), c(0.0, 0.0)).unwrap();
        let st = still(&cat);
        let r1 = reduce(&st, 1).unwrap();
        let r2 = reduce(&st, 2).unwrap();
        assert!((r1.trace() - 1.0).abs() < 1e-12);
        assert!((r2.trace() - 1.0).abs() < 1e-12);
        // ρ₁ is the pure cat
        assert!((reduced_overlap(&r1, &r1).unwrap() - 1.0).abs() < 1e-12);
        // ρ₂ is vacuum
        let vac = reduce(&still(&CoherentSuperposition::vacuum(3).unwrap()), 2).unwrap();
        assert!((reduced_overlap(&r2, &vac).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(vac.amplitudes, vec![c(0.0, 0.0)]);
        assert!((vac.weights()[[0, 0]] - 1.0).norm() < 1e-15);
        assert!(reduce(&st, 4).is_err());
    }

    #[test]
    fn cat_vacuum_overlap() {
        let cat = make_cat(2, 1, c(5.0, 0.0), c(0.0, 0.0)).unwrap();
        let rho = reduce(&still(&cat), 1).unwrap();
        let vac = reduce(&still(&CoherentSuperposition::vacuum(2).unwrap()), 1).unwrap();
        let want = 4.0 * cat.norm_sq() * (-25f64).exp();
        let got = reduced_overlap(&rho, &vac).unwrap();
        assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
        let flipped = make_cat(2, 1, c(-5.0, 0.0), c(0.0, 0.0)).unwrap();
        let rf = reduce(&still(&flipped), 1).unwrap();
        assert!((reduced_overlap(&rho, &rf).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_mode_swap_moves_the_cat() {
        let w = 0.7;
        let t = NetworkTopology::ideal(vec![w, w], array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let th = theta_at(&build_general(&t), std::f64::consts::FRAC_PI_2).unwrap();
        let alpha = c(1.5, -0.3);
        let st = evolve(&make_cat(2, 1, alpha, c(0.0, 0.0)).unwrap(), &th).unwrap();
        let moved = -Complex64::i() * Complex64::from_polar(1.0, -w * std::f64::consts::FRAC_PI_2) * alpha;
        let rho2 = reduce(&st, 2).unwrap();
        assert!((rho2.amplitudes[0] - moved).norm() < 1e-12);
        let target = reduce(&still(&make_cat(2, 1, moved, c(0.0, 0.0)).unwrap()), 1).unwrap();
        assert!((reduced_overlap(&rho2, &target).unwrap() - 1.0).abs() < 1e-10);
        assert!((st.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_formula_agrees() {
        let t = NetworkTopology::new(
            vec![1.0, 1.4, 1.0],
            array![[0.0, 0.8, 0.0], [0.8, 0.0, 0.8], [0.0, 0.8, 0.0]],
            array![[0.0, 0.0, 0.0], [0.0, 0.3, 0.0], [0.0, 0.0, 0.0]],
        )
        .unwrap();
        let g = build_general(&t);
        let cat = make_cat(3, 1, c(1.2, 0.7), c(0.0, 0.0)).unwrap();
        let rho1 = reduce(&still(&cat), 1).unwrap();
        for tau in [0.0, 0.7, 2.9, 11.0] {
            let st = evolve(&cat, &theta_at(&g, tau).unwrap()).unwrap();
            let general = reduced_overlap(&rho1, &reduce(&st, 3).unwrap()).unwrap();
            let explicit = transfer_probability_explicit(&st, 1, 3).unwrap();
            assert!((general - explicit).abs() < 1e-12, "tau={tau}");
        }
    }

    #[test]
    fn network_fidelity_at_rest_is_purity() {
        let cat = make_cat(3, 2, c(0.9, 0.1), c(0.2, 0.0)).unwrap();
        assert!((network_fidelity(&still(&cat)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permutation() {
        let cat = make_cat(3, 1, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let moved = cat.permuted_modes(&[2, 1, 0]).unwrap();
        assert_eq!(moved.branches()[0].beta[2], c(1.0, 0.0));
        assert!(cat.permuted_modes(&[0, 0, 1]).is_err());
        assert!(cat.permuted_modes(&[0, 1]).is_err());
    }
}
