//! Transfer and recurrence probabilities along a τ grid.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coherent::{evolve, evolve_with, reduce, reduced_overlap, CoherentSuperposition, EvolvedState, ReducedState};
use crate::error::{Error, Result};
use crate::propagator::{theta_expm, Evolver};
use crate::topology::DissipativeGenerator;

use super::exchange::golden_max;

/// Branch count above which the quartic pair sums get slow.
pub const BRANCH_WARN_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// Probabilities at the sampled times.
    Raw,
    /// Probabilities with the fast carrier phase removed: `p_ex` is taken
    /// with `Θ_{R,S}(τ)` rotated onto the positive real axis and `p_rec`
    /// with `Θ_{S,S}(τ)` rotated likewise, which traces the upper envelope
    /// of the fast oscillations.
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferPoint {
    pub tau: f64,
    pub p_ex: f64,
    pub p_rec: f64,
    pub precise: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransferCurve {
    pub tau: Vec<f64>,
    pub p_ex: Vec<f64>,
    pub p_rec: Vec<f64>,
    pub precise: Vec<bool>,
}

impl TransferCurve {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = TransferPoint> + '_ {
        (0..self.len()).map(|i| TransferPoint {
            tau: self.tau[i],
            p_ex: self.p_ex[i],
            p_rec: self.p_rec[i],
            precise: self.precise[i],
        })
    }

    /// Sample with the largest `p_ex` (first on ties).
    pub fn peak_ex(&self) -> Option<TransferPoint> {
        self.points().fold(None, |best: Option<TransferPoint>, p| match best {
            Some(b) if b.p_ex >= p.p_ex => Some(b),
            _ => Some(p),
        })
    }

    pub fn all_precise(&self) -> bool {
        self.precise.iter().all(|&p| p)
    }
}

impl FromIterator<TransferPoint> for TransferCurve {
    fn from_iter<T: IntoIterator<Item = TransferPoint>>(iter: T) -> Self {
        let mut c = Self::default();
        for p in iter {
            c.tau.push(p.tau);
            c.p_ex.push(p.p_ex);
            c.p_rec.push(p.p_rec);
            c.precise.push(p.precise);
        }
        c
    }
}

#[derive(Debug, Clone)]
enum Path {
    Spectral(Evolver),
    Expm(DissipativeGenerator),
}

/// Network, initial superposition and the sender/receiver pair (1-based).
#[derive(Debug, Clone)]
pub struct TransferScenario {
    path: Path,
    initial: CoherentSuperposition,
    reference: ReducedState,
    pub sender: usize,
    pub receiver: usize,
}

impl TransferScenario {
    pub fn new(gen: &DissipativeGenerator, initial: CoherentSuperposition, sender: usize, receiver: usize) -> Result<Self> {
        let n = gen.n();
        if initial.n() != n {
            return Err(Error::DimensionMismatch {
                what: "initial state modes",
                expected: n,
                got: initial.n(),
            });
        }
        for m in [sender, receiver] {
            if m == 0 || m > n {
                return Err(Error::InvalidParameter(format!("mode {m} out of range 1..={n}")));
            }
        }
        if initial.branches().len() > BRANCH_WARN_LIMIT {
            log::warn!(
                "{} branches: overlap sums scale with the fourth power of the branch count",
                initial.branches().len()
            );
        }
        let path = match Evolver::new(gen) {
            Ok(ev) => Path::Spectral(ev),
            Err(Error::NearDefective { residual, condition }) => {
                log::warn!("eigendecomposition rejected (residual {residual:.2e}, condition {condition:.2e}); sampling with expm");
                Path::Expm(gen.clone())
            }
            Err(e) => return Err(e),
        };
        let reference = reduce(&initial.at_rest(), sender)?;
        Ok(Self {
            path,
            initial,
            reference,
            sender,
            receiver,
        })
    }

    /// Sender 1, receiver N.
    pub fn end_to_end(gen: &DissipativeGenerator, initial: CoherentSuperposition) -> Result<Self> {
        let n = gen.n();
        Self::new(gen, initial, 1, n)
    }

    pub fn initial(&self) -> &CoherentSuperposition {
        &self.initial
    }

    pub fn evolver(&self) -> Option<&Evolver> {
        match &self.path {
            Path::Spectral(ev) => Some(ev),
            Path::Expm(_) => None,
        }
    }

    pub fn evolved(&self, tau: f64) -> Result<EvolvedState> {
        match &self.path {
            Path::Spectral(ev) => evolve_with(&self.initial, ev, tau),
            Path::Expm(g) => evolve(&self.initial, &theta_expm(g, tau)?),
        }
    }

    fn entries(&self, tau: f64) -> Result<(Complex64, Complex64)> {
        let (s, r) = (self.sender - 1, self.receiver - 1);
        match &self.path {
            Path::Spectral(ev) => Ok((ev.entry(r, s, tau)?.0, ev.entry(s, s, tau)?.0)),
            Path::Expm(g) => {
                let m = theta_expm(g, tau)?.matrix;
                Ok((m[[r, s]], m[[s, s]]))
            }
        }
    }

    pub fn point(&self, tau: f64, mode: SampleMode) -> Result<TransferPoint> {
        let state = self.evolved(tau)?;
        let (ex_state, rec_state) = match mode {
            SampleMode::Raw => (state.clone(), state.clone()),
            SampleMode::Envelope => {
                let (t_rs, t_ss) = self.entries(tau)?;
                (state.rotated(-t_rs.arg()), state.rotated(-t_ss.arg()))
            }
        };
        let p_ex = reduced_overlap(&self.reference, &reduce(&ex_state, self.receiver)?)?;
        let p_rec = reduced_overlap(&self.reference, &reduce(&rec_state, self.sender)?)?;
        Ok(TransferPoint {
            tau,
            p_ex,
            p_rec,
            precise: state.precise,
        })
    }
}

/// Probabilities at every τ in `taus`, evaluated in parallel.
pub fn transfer_curve(scenario: &TransferScenario, taus: &[f64], mode: SampleMode) -> Result<TransferCurve> {
    let points: Vec<TransferPoint> = taus
        .par_iter()
        .map(|&t| scenario.point(t, mode))
        .collect::<Result<_>>()?;
    Ok(points.into_iter().collect())
}

/// Largest raw `p_ex` (or `p_rec` with `recurrence`) in
/// `[center − half_width, center + half_width]`: a uniform scan with
/// `samples` points followed by golden-section refinement.
pub fn raw_peak_near(
    scenario: &TransferScenario,
    center: f64,
    half_width: f64,
    samples: usize,
    recurrence: bool,
) -> Result<TransferPoint> {
    let lo = (center - half_width).max(0.0);
    let hi = center + half_width;
    let samples = samples.max(3);
    let taus: Vec<f64> = (0..samples)
        .map(|j| lo + (hi - lo) * j as f64 / (samples - 1) as f64)
        .collect();
    let curve = transfer_curve(scenario, &taus, SampleMode::Raw)?;
    let values = if recurrence { &curve.p_rec } else { &curve.p_ex };
    let best = (0..samples).fold(0, |b, j| if values[j] > values[b] { j } else { b });
    let a = taus[best.saturating_sub(1)];
    let b = taus[(best + 1).min(samples - 1)];
    let pick = |p: &TransferPoint| if recurrence { p.p_rec } else { p.p_ex };
    let f = |t: f64| scenario.point(t, SampleMode::Raw).map(|p| pick(&p)).unwrap_or(f64::NEG_INFINITY);
    let t = golden_max(f, a, b, 1e-12 * hi.max(1.0));
    let refined = scenario.point(t, SampleMode::Raw)?;
    let sampled = curve.points().nth(best).expect("non-empty scan");
    Ok(if pick(&refined) >= pick(&sampled) { refined } else { sampled })
}
