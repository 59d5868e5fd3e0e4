//! Exchange time from `|Θ_{N1}(τ)|`: envelope scan with golden-section
//! refinement, and the spectral (ideal-network) route via the `cos`/`sin`
//! sums over the eigenbasis of `H`.
//!
//! `Θ_{N1}(τ) = Σ_k c_k e^{-𝔚_k τ}` with `c_k = D_{Nk} D⁻¹_{k1}`. Components
//! with `|c_k|` well below the largest are the virtual transmitter modes;
//! they only add small fast ripples and are left out of the envelope, which
//! is sampled at a step set by the spread of the remaining slow
//! frequencies around their weighted mean (the carrier).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{decompose, phase_accurate_exp, Evolver};
use crate::topology::DissipativeGenerator;

/// Components below this fraction of the largest `|c_k|` are fast.
pub const SLOW_WEIGHT_FRACTION: f64 = 1e-3;
/// Upper bound on envelope grid points per search.
pub const MAX_SCAN_SAMPLES: usize = 10_000_000;
/// Smallest envelope peak accepted as a transfer.
pub const MIN_TRANSFER_PEAK: f64 = 0.5;
/// Tolerance on the `cos`/`sin` sum conditions.
pub const SPECTRAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeMethod {
    NumericPeak,
    Spectral,
    Analytic,
}

impl ExchangeMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NumericPeak => "numeric-peak",
            Self::Spectral => "spectral",
            Self::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeReport {
    pub tau_ex: f64,
    /// `|Θ_{N1}(τ_ex)|²`.
    pub peak_p: f64,
    pub theta_corner: Complex64,
    pub method: ExchangeMethod,
    pub precise: bool,
}

#[derive(Debug, Clone)]
struct Modes {
    coeffs: Vec<Complex64>,
    rates: Vec<Complex64>,
    slow: Vec<usize>,
    carrier: f64,
    /// Largest `|Im 𝔚_k − carrier|` over the slow set.
    spread: f64,
}

impl Modes {
    fn new(coeffs: Vec<Complex64>, rates: Vec<Complex64>) -> Option<Self> {
        let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if cmax == 0.0 {
            return None;
        }
        let slow: Vec<usize> = (0..coeffs.len())
            .filter(|&k| coeffs[k].norm() >= SLOW_WEIGHT_FRACTION * cmax)
            .collect();
        let wsum: f64 = slow.iter().map(|&k| coeffs[k].norm()).sum();
        let carrier = slow.iter().map(|&k| coeffs[k].norm() * rates[k].im).sum::<f64>() / wsum;
        let spread = slow.iter().map(|&k| (rates[k].im - carrier).abs()).fold(0.0, f64::max);
        Some(Self {
            coeffs,
            rates,
            slow,
            carrier,
            spread,
        })
    }

    /// Demodulated slow sum `A(τ) = Σ_slow c_k e^{-(𝔚_k - i·carrier)τ}`.
    fn envelope(&self, tau: f64) -> (Complex64, bool) {
        let mut ok = true;
        let mut a = Complex64::new(0.0, 0.0);
        for &k in &self.slow {
            let w = self.rates[k] - Complex64::new(0.0, self.carrier);
            let (e, p) = phase_accurate_exp(w, tau);
            ok &= p;
            a += self.coeffs[k] * e;
        }
        (a, ok)
    }

    /// `d|A|²/dτ`.
    fn envelope_slope(&self, tau: f64) -> f64 {
        let mut a = Complex64::new(0.0, 0.0);
        let mut da = Complex64::new(0.0, 0.0);
        for &k in &self.slow {
            let w = self.rates[k] - Complex64::new(0.0, self.carrier);
            let (e, _) = phase_accurate_exp(w, tau);
            a += self.coeffs[k] * e;
            da -= w * self.coeffs[k] * e;
        }
        2.0 * (a.conj() * da).re
    }

    /// Full `Θ_{N1}(τ)` including fast components.
    fn full(&self, tau: f64) -> (Complex64, bool) {
        let mut ok = true;
        let mut s = Complex64::new(0.0, 0.0);
        for (c, &w) in self.coeffs.iter().zip(&self.rates) {
            let (e, p) = phase_accurate_exp(w, tau);
            ok &= p;
            s += c * e;
        }
        (s, ok)
    }

    fn grid(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let width = hi - lo;
        let step = if self.spread > 0.0 {
            std::f64::consts::PI / (8.0 * self.spread)
        } else {
            width / 16.0
        };
        let count = (width / step).ceil() as usize + 1;
        if count > MAX_SCAN_SAMPLES {
            return Err(Error::Guardrail(format!(
                "window [{lo}, {hi}] needs {count} envelope samples (limit {MAX_SCAN_SAMPLES}); narrow the window"
            )));
        }
        let count = count.max(3);
        Ok((0..count).map(|j| lo + width * j as f64 / (count - 1) as f64).collect())
    }
}

fn check_window(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi <= lo {
        return Err(Error::InvalidParameter(format!("invalid search window [{lo}, {hi}]")));
    }
    Ok(())
}

fn modes_between(evolver: &Evolver, sender: usize, receiver: usize) -> Result<Option<Modes>> {
    let n = evolver.n();
    for m in [sender, receiver] {
        if m == 0 || m > n {
            return Err(Error::InvalidParameter(format!("mode {m} out of range 1..={n}")));
        }
    }
    let d = evolver.decomposition();
    Ok(Modes::new(d.modal_coefficients(receiver - 1, sender - 1), d.eigenvalues.clone()))
}

/// Maximizes `f` on `[a, b]`; ties go to the smaller abscissa.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

/// First envelope maximum of `|Θ_{N1}|²` in `[window.0, window.1]`.
pub fn exchange_time_numeric(gen: &DissipativeGenerator, window: (f64, f64), refine_tol: f64) -> Result<ExchangeReport> {
    let ev = Evolver::new(gen)?;
    exchange_time_numeric_between(&ev, 1, gen.n(), window, refine_tol)
}

/// As [`exchange_time_numeric`] for an arbitrary sender/receiver pair (1-based).
pub fn exchange_time_numeric_between(
    evolver: &Evolver,
    sender: usize,
    receiver: usize,
    window: (f64, f64),
    refine_tol: f64,
) -> Result<ExchangeReport> {
    let (lo, hi) = window;
    check_window(lo, hi)?;
    let Some(modes) = modes_between(evolver, sender, receiver)? else {
        return Err(Error::NoTransferInWindow { best_tau: lo, best_p: 0.0 });
    };
    let grid = modes.grid(lo, hi)?;
    let p: Vec<f64> = grid.iter().map(|&t| modes.envelope(t).0.norm_sqr()).collect();
    let last = p.len() - 1;
    let peak = (0..=last).find(|&j| {
        p[j] >= MIN_TRANSFER_PEAK && (j == 0 || p[j] >= p[j - 1]) && (j == last || p[j] >= p[j + 1])
    });
    let Some(j) = peak else {
        let (jb, pb) = p
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (j, &x)| if x > acc.1 { (j, x) } else { acc });
        return Err(Error::NoTransferInWindow {
            best_tau: grid[jb],
            best_p: pb,
        });
    };
    let a = grid[j.saturating_sub(1)];
    let b = grid[(j + 1).min(last)];
    let tol = refine_tol * grid[j].abs().max(b - a);
    let tau_ex = golden_max(|t| modes.envelope(t).0.norm_sqr(), a, b, tol);
    let (corner, precise) = modes.full(tau_ex);
    Ok(ExchangeReport {
        tau_ex,
        peak_p: corner.norm_sqr(),
        theta_corner: corner,
        method: ExchangeMethod::NumericPeak,
        precise,
    })
}

fn wrap(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = x.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Which of the two exchange conditions holds at `τ`:
/// `Σ C cos(Rτ) C⁻¹ = ±1, Σ C sin(Rτ) C⁻¹ = 0` or the same with the roles
/// of the two sums swapped.
fn spectral_conditions(corner: Complex64) -> bool {
    let cos_sum = corner.re;
    let sin_sum = -corner.im;
    let real = (cos_sum.abs() - 1.0).abs() <= SPECTRAL_TOL && sin_sum.abs() <= SPECTRAL_TOL;
    let quadrature = (sin_sum.abs() - 1.0).abs() <= SPECTRAL_TOL && cos_sum.abs() <= SPECTRAL_TOL;
    real || quadrature
}

/// Smallest `τ` in the window satisfying the spectral exchange conditions
/// for an undamped network.
pub fn exchange_time_spectral(gen: &DissipativeGenerator, window: (f64, f64)) -> Result<ExchangeReport> {
    if !gen.is_ideal() {
        return Err(Error::InvalidParameter(
            "spectral exchange time needs an undamped generator".into(),
        ));
    }
    let (lo, hi) = window;
    check_window(lo, hi)?;
    let d = decompose(gen)?;
    let n = gen.n();
    let Some(modes) = Modes::new(d.modal_coefficients(n - 1, 0), d.eigenvalues.clone()) else {
        return Err(Error::NoSpectralRoot);
    };
    let grid = modes.grid(lo, hi)?;
    let slope: Vec<f64> = grid.iter().map(|&t| modes.envelope_slope(t)).collect();
    for j in 0..grid.len() - 1 {
        if !(slope[j] > 0.0 && slope[j + 1] <= 0.0) {
            continue;
        }
        let (mut a, mut b) = (grid[j], grid[j + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if modes.envelope_slope(mid) > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let peak = 0.5 * (a + b);
        if let Some(rep) = align_phase(&modes, peak, lo, hi) {
            return Ok(rep);
        }
    }
    Err(Error::NoSpectralRoot)
}

/// Moves `peak` by less than a carrier period so the corner phase lands on
/// a multiple of π/2, keeping the candidate that satisfies the conditions
/// with the smallest shift.
fn align_phase(modes: &Modes, peak: f64, lo: f64, hi: f64) -> Option<ExchangeReport> {
    let mut candidates = vec![peak];
    if modes.carrier.abs() > 0.0 {
        let (s, _) = modes.full(peak);
        for q in 0..4 {
            let target = q as f64 * std::f64::consts::FRAC_PI_2;
            let mut tau = peak + wrap(s.arg() - target) / modes.carrier;
            for _ in 0..4 {
                let (z, _) = modes.full(tau);
                tau += wrap(z.arg() - target) / modes.carrier;
            }
            candidates.push(tau);
        }
    }
    candidates
        .into_iter()
        .filter(|&t| t >= lo && t <= hi)
        .filter_map(|t| {
            let (z, precise) = modes.full(t);
            spectral_conditions(z).then_some((t, z, precise))
        })
        .min_by(|x, y| (x.0 - peak).abs().total_cmp(&(y.0 - peak).abs()))
        .map(|(t, z, precise)| ExchangeReport {
            tau_ex: t,
            peak_p: z.norm_sqr(),
            theta_corner: z,
            method: ExchangeMethod::Spectral,
            precise,
        })
}
