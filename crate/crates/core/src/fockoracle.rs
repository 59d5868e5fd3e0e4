//! Brute-force check of the coherent-state algebra: the Lindblad master
//! equation integrated on a truncated Fock space.
//!
//! Basis states are occupation tuples `(n_1, …, n_N)` with every `n_m < d`
//! and total excitation `Σ n_m < d`. The model conserves excitation number
//! except for loss, which only lowers it, so this subspace is invariant and
//! the truncation is exact for states that start inside it. States are
//! ordered by their mode-major flattened index `Σ_m n_m d^{N-m}` (mode 1
//! varies slowest); [`FockDensity::to_full_matrix`] embeds into the full
//! `d^N × d^N` product space with that same ordering.

use std::collections::HashMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::coherent::CoherentSuperposition;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, CMatrix, CompensatedSum, ZERO};
use crate::topology::NetworkTopology;

/// Largest mode count accepted without an explicit override.
pub const MAX_MODES: usize = 4;
/// Largest per-mode cutoff accepted without an explicit override.
pub const MAX_CUTOFF: usize = 12;
/// Encoding fails when this much norm falls outside the basis.
pub const TRUNCATION_LIMIT: f64 = 1e-6;
/// Tolerated trace drift over one integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;
/// Target for `step · ‖generator‖`.
pub const STEP_NORM: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    modes: usize,
    cutoff: usize,
    states: Vec<Vec<usize>>,
    flat: Vec<usize>,
}

impl FockBasis {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self> {
        Self::with_override(modes, cutoff, false)
    }

    /// `allow_slow` lifts the size guardrails.
    pub fn with_override(modes: usize, cutoff: usize, allow_slow: bool) -> Result<Self> {
        if modes == 0 || cutoff == 0 {
            return Err(Error::InvalidParameter("Fock basis needs at least one mode and cutoff >= 1".into()));
        }
        if !allow_slow && (modes > MAX_MODES || cutoff > MAX_CUTOFF) {
            return Err(Error::Guardrail(format!(
                "{modes} modes with cutoff {cutoff} exceeds the oracle limits ({MAX_MODES} modes, cutoff {MAX_CUTOFF}); pass allow_slow to override"
            )));
        }
        let mut states = Vec::new();
        let mut cur = vec![0usize; modes];
        fill(&mut states, &mut cur, 0, cutoff - 1);
        let flat = states
            .iter()
            .map(|s| s.iter().fold(0, |acc, &k| acc * cutoff + k))
            .collect();
        Ok(Self {
            modes,
            cutoff,
            states,
            flat,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[usize] {
        &self.states[i]
    }

    pub fn index_of(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.modes || occupations.iter().sum::<usize>() >= self.cutoff {
            return None;
        }
        self.states.binary_search_by(|s| s.as_slice().cmp(occupations)).ok()
    }

    /// Position in the full `d^N` product basis.
    pub fn flat_index(&self, i: usize) -> usize {
        self.flat[i]
    }

    fn raise_table(&self, mode: usize) -> Vec<Option<usize>> {
        (0..self.dim())
            .map(|i| {
                let mut s = self.states[i].clone();
                s[mode] += 1;
                self.index_of(&s)
            })
            .collect()
    }
}

// lexicographic enumeration = mode-major flattened order
fn fill(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, m: usize, budget: usize) {
    if m == cur.len() {
        out.push(cur.clone());
        return;
    }
    for k in 0..=budget {
        cur[m] = k;
        fill(out, cur, m + 1, budget - k);
    }
    cur[m] = 0;
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    basis: FockBasis,
    matrix: CMatrix,
}

impl FockDensity {
    pub fn new(basis: FockBasis, matrix: CMatrix) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                what: "Fock density matrix",
                expected: d,
                got: matrix.nrows(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn pure(basis: FockBasis, psi: &[Complex64]) -> Result<Self> {
        let d = basis.dim();
        if psi.len() != d {
            return Err(Error::DimensionMismatch {
                what: "Fock state vector",
                expected: d,
                got: psi.len(),
            });
        }
        let matrix = Array2::from_shape_fn((d, d), |(i, j)| psi[i] * psi[j].conj());
        Ok(Self { basis, matrix })
    }

    pub fn number_state(basis: FockBasis, occupations: &[usize]) -> Result<Self> {
        let i = basis
            .index_of(occupations)
            .ok_or_else(|| Error::InvalidParameter(format!("{occupations:?} is outside the truncated basis")))?;
        let mut psi = vec![ZERO; basis.dim()];
        psi[i] = Complex64::new(1.0, 0.0);
        Self::pure(basis, &psi)
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.basis.dim()).map(|i| self.matrix[[i, i]].re).collect::<CompensatedSum>().value()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        m.indexed_iter()
            .map(|((i, j), z)| (z - m[[j, i]].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        fock_overlap(self, self).unwrap_or(f64::NAN)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let d = self.basis.dim();
        let m = &self.matrix;
        // real embedding [[Re, -Im], [Im, Re]] has each eigenvalue twice
        let embed = Array2::from_shape_fn((2 * d, 2 * d), |(i, j)| {
            let z = 0.5 * (m[[i % d, j % d]] + m[[j % d, i % d]].conj());
            match (i < d, j < d) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        Ok(symmetric_eigen(&embed)?.values[0])
    }

    /// Mean occupation of a 1-based mode.
    pub fn occupation(&self, mode: usize) -> Result<f64> {
        let m = check_mode(mode, self.basis.modes)?;
        Ok((0..self.basis.dim())
            .map(|i| self.basis.states[i][m] as f64 * self.matrix[[i, i]].re)
            .collect::<CompensatedSum>()
            .value())
    }

    /// `⟨a_m⟩` for a 1-based mode.
    pub fn amplitude(&self, mode: usize) -> Result<Complex64> {
        let m = check_mode(mode, self.basis.modes)?;
        let mut acc = ZERO;
        for i in 0..self.basis.dim() {
            let mut s = self.basis.states[i].clone();
            if s[m] == 0 {
                continue;
            }
            s[m] -= 1;
            if let Some(j) = self.basis.index_of(&s) {
                // ⟨j| a |i⟩ = √n_i, contributes ρ_ij ⟨j|a|i⟩
                acc += self.matrix[[i, j]] * (self.basis.states[i][m] as f64).sqrt();
            }
        }
        Ok(acc)
    }

    /// Embedding into the full `d^N × d^N` product basis.
    pub fn to_full_matrix(&self) -> CMatrix {
        let b = &self.basis;
        let full = b.cutoff.pow(b.modes as u32);
        let mut out = Array2::from_elem((full, full), ZERO);
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                out[[b.flat[i], b.flat[j]]] = self.matrix[[i, j]];
            }
        }
        out
    }

    /// Partial trace onto a 1-based mode.
    pub fn reduce(&self, mode: usize) -> Result<FockDensity> {
        let m = check_mode(mode, self.basis.modes)?;
        let d = self.basis.cutoff;
        let mut groups: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        for (i, s) in self.basis.states.iter().enumerate() {
            let mut rest = s.clone();
            rest.remove(m);
            groups.entry(rest).or_default().push((i, s[m]));
        }
        let mut keys: Vec<_> = groups.keys().cloned().collect();
        keys.sort();
        let mut out = Array2::from_elem((d, d), ZERO);
        for k in keys {
            let members = &groups[&k];
            for &(i, ki) in members {
                for &(j, kj) in members {
                    out[[ki, kj]] += self.matrix[[i, j]];
                }
            }
        }
        FockDensity::new(FockBasis::with_override(1, d, true)?, out)
    }
}

fn check_mode(mode: usize, n: usize) -> Result<usize> {
    if mode == 0 || mode > n {
        return Err(Error::InvalidParameter(format!("mode {mode} out of range 1..={n}")));
    }
    Ok(mode - 1)
}

/// `Tr[ρ_a ρ_b]`.
pub fn fock_overlap(a: &FockDensity, b: &FockDensity) -> Result<f64> {
    if a.basis != b.basis {
        return Err(Error::DimensionMismatch {
            what: "Fock overlap bases",
            expected: a.basis.dim(),
            got: b.basis.dim(),
        });
    }
    let d = a.basis.dim();
    let mut acc = CompensatedSum::new();
    for i in 0..d {
        for j in 0..d {
            acc.add((a.matrix[[i, j]] * b.matrix[[j, i]]).re);
        }
    }
    Ok(acc.value())
}

/// Density matrix of a coherent superposition in the truncated basis,
/// renormalized; also returns the norm that fell outside.
pub fn encode_coherent(state: &CoherentSuperposition, basis: &FockBasis) -> Result<(FockDensity, f64)> {
    if state.n() != basis.modes {
        return Err(Error::DimensionMismatch {
            what: "state modes vs Fock basis",
            expected: basis.modes,
            got: state.n(),
        });
    }
    let d = basis.cutoff;
    let norm = state.norm_sq().sqrt();
    let mut psi = vec![ZERO; basis.dim()];
    for br in state.branches() {
        // per-mode coefficients e^{-|β|²/2} β^k / √k!
        let coeffs: Vec<Vec<Complex64>> = br
            .beta
            .iter()
            .map(|&b| {
                let mut c = Vec::with_capacity(d);
                let mut cur = Complex64::new((-0.5 * b.norm_sqr()).exp(), 0.0);
                for k in 0..d {
                    c.push(cur);
                    cur = cur * b / ((k + 1) as f64).sqrt();
                }
                c
            })
            .collect();
        for (i, s) in basis.states.iter().enumerate() {
            let amp: Complex64 = s.iter().enumerate().map(|(m, &k)| coeffs[m][k]).product();
            psi[i] += norm * br.amplitude * amp;
        }
    }
    let kept: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let defect = (1.0 - kept).max(0.0);
    if defect > TRUNCATION_LIMIT {
        return Err(Error::Truncation {
            defect,
            limit: TRUNCATION_LIMIT,
        });
    }
    let s = kept.sqrt();
    psi.iter_mut().for_each(|z| *z /= s);
    Ok((FockDensity::pure(basis.clone(), &psi)?, defect))
}

/// Sparse real symmetric many-body Hamiltonian, compressed rows.
#[derive(Debug, Clone)]
struct Csr {
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

/// Fixed-step RK4 integrator of
/// `dρ/dt = -i[H, ρ] + Σ_m Γ_m (a_m ρ a_m† − ½{a_m† a_m, ρ})`.
#[derive(Debug, Clone)]
pub struct LindbladIntegrator {
    basis: FockBasis,
    h: Csr,
    gamma: Vec<f64>,
    raise: Vec<Vec<Option<usize>>>,
    norm_bound: f64,
}

impl LindbladIntegrator {
    pub fn new(basis: &FockBasis, topology: &NetworkTopology) -> Result<Self> {
        if !topology.is_gamma_diagonal() {
            return Err(Error::InvalidParameter("the Fock oracle handles diagonal damping only".into()));
        }
        let gamma: Vec<f64> = (0..topology.n()).map(|m| topology.gamma()[[m, m]]).collect();
        Self::from_parts(basis, topology.omega(), topology.lambda(), &gamma)
    }

    /// Frequencies, couplings and per-mode damping given directly; allows a
    /// single mode.
    pub fn from_parts(basis: &FockBasis, omega: &[f64], lambda: &Array2<f64>, gamma: &[f64]) -> Result<Self> {
        let n = basis.modes;
        if omega.len() != n || gamma.len() != n || lambda.nrows() != n || lambda.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "oracle parameters vs Fock basis modes",
                expected: n,
                got: omega.len(),
            });
        }
        let dim = basis.dim();
        let mut row_ptr = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        let mut diag = vec![0.0; dim];
        for i in 0..dim {
            let s = &basis.states[i];
            let mut entries: Vec<(usize, f64)> = Vec::new();
            diag[i] = s.iter().zip(omega).map(|(&k, w)| k as f64 * w).sum();
            entries.push((i, diag[i]));
            // λ_mn a_m† a_n
            for m in 0..n {
                for k in 0..n {
                    let l = lambda[[m, k]];
                    if m == k || l == 0.0 || s[k] == 0 {
                        continue;
                    }
                    let mut t = s.clone();
                    t[k] -= 1;
                    t[m] += 1;
                    if let Some(j) = basis.index_of(&t) {
                        entries.push((j, l * ((s[k] * t[m]) as f64).sqrt()));
                    }
                }
            }
            entries.sort_by_key(|e| e.0);
            for (j, v) in entries {
                col.push(j);
                val.push(v);
            }
            row_ptr.push(col.len());
        }
        // Gershgorin bound on the spread of H about its diagonal midpoint
        let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mid = 0.5 * (lo + hi);
        let spread = (0..dim)
            .map(|i| {
                (row_ptr[i]..row_ptr[i + 1])
                    .map(|p| if col[p] == i { (val[p] - mid).abs() } else { val[p].abs() })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let kmax = (basis.cutoff - 1) as f64;
        let norm_bound = 2.0 * spread + gamma.iter().map(|g| 2.0 * g.abs() * kmax).sum::<f64>();
        Ok(Self {
            basis: basis.clone(),
            h: Csr { row_ptr, col, val },
            gamma: gamma.to_vec(),
            raise: (0..n).map(|m| basis.raise_table(m)).collect(),
            norm_bound,
        })
    }

    /// Upper bound on the generator norm used to pick the step.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    fn apply(&self, rho: &[Complex64], out: &mut [Complex64], x: &mut [Complex64]) {
        let d = self.basis.dim();
        let h = &self.h;
        // X = H ρ
        for i in 0..d {
            let row = &mut x[i * d..(i + 1) * d];
            row.iter_mut().for_each(|z| *z = ZERO);
            for p in h.row_ptr[i]..h.row_ptr[i + 1] {
                let v = h.val[p];
                let src = &rho[h.col[p] * d..(h.col[p] + 1) * d];
                for (o, s) in row.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
        let mi = Complex64::new(0.0, -1.0);
        for i in 0..d {
            for j in 0..d {
                // -i (Hρ - ρH) with ρH = (Hρ)†
                out[i * d + j] = mi * (x[i * d + j] - x[j * d + i].conj());
            }
        }
        for (m, &g) in self.gamma.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            let up = &self.raise[m];
            for i in 0..d {
                let ni = self.basis.states[i][m] as f64;
                for j in 0..d {
                    let nj = self.basis.states[j][m] as f64;
                    let mut acc = -0.5 * (ni + nj) * rho[i * d + j];
                    if let (Some(a), Some(b)) = (up[i], up[j]) {
                        acc += ((ni + 1.0) * (nj + 1.0)).sqrt() * rho[a * d + b];
                    }
                    out[i * d + j] += g * acc;
                }
            }
        }
    }

    fn integrate(&self, rho: &mut Vec<Complex64>, t: f64) {
        if t <= 0.0 {
            return;
        }
        let steps = ((t * self.norm_bound / STEP_NORM).ceil() as usize).max(1);
        let h = t / steps as f64;
        let len = rho.len();
        let mut k = vec![ZERO; len];
        let mut acc = vec![ZERO; len];
        let mut stage = vec![ZERO; len];
        let mut x = vec![ZERO; len];
        for _ in 0..steps {
            acc.copy_from_slice(rho);
            // k1
            self.apply(rho, &mut k, &mut x);
            for i in 0..len {
                acc[i] += k[i] * (h / 6.0);
                stage[i] = rho[i] + k[i] * (h / 2.0);
            }
            // k2
            self.apply(&stage, &mut k, &mut x);
            for i in 0..len {
                acc[i] += k[i] * (h / 3.0);
                stage[i] = rho[i] + k[i] * (h / 2.0);
            }
            // k3
            self.apply(&stage, &mut k, &mut x);
            for i in 0..len {
                acc[i] += k[i] * (h / 3.0);
                stage[i] = rho[i] + k[i] * h;
            }
            // k4
            self.apply(&stage, &mut k, &mut x);
            for i in 0..len {
                acc[i] += k[i] * (h / 6.0);
            }
            std::mem::swap(rho, &mut acc);
        }
    }

    fn check_basis(&self, rho: &FockDensity) -> Result<()> {
        if rho.basis != self.basis {
            return Err(Error::DimensionMismatch {
                what: "density basis vs integrator basis",
                expected: self.basis.dim(),
                got: rho.basis.dim(),
            });
        }
        Ok(())
    }

    /// `ρ(t)` from `ρ(0) = rho`.
    pub fn evolve(&self, rho: &FockDensity, t: f64) -> Result<FockDensity> {
        Ok(self.sample(rho, &[t])?.pop().expect("one sample"))
    }

    /// `ρ` at each of the ascending times `times`, integrating once.
    pub fn sample(&self, rho: &FockDensity, times: &[f64]) -> Result<Vec<FockDensity>> {
        self.check_basis(rho)?;
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("sample times must be finite, non-negative and ascending".into()));
        }
        let d = self.basis.dim();
        let start = rho.trace();
        let mut cur: Vec<Complex64> = rho.matrix.iter().copied().collect();
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            self.integrate(&mut cur, t - now);
            now = t;
            let m = Array2::from_shape_vec((d, d), cur.clone()).expect("square buffer");
            let next = FockDensity::new(self.basis.clone(), m)?;
            let drift = (next.trace() - start).abs();
            if drift > TRACE_DRIFT_LIMIT {
                return Err(Error::StepSize(drift));
            }
            out.push(next);
        }
        Ok(out)
    }
}

/// One-shot evolution of `rho` under `topology` for time `t`.
pub fn lindblad_evolve(rho: &FockDensity, topology: &NetworkTopology, t: f64) -> Result<FockDensity> {
    LindbladIntegrator::new(rho.basis(), topology)?.evolve(rho, t)
}
