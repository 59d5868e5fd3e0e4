//! Closed-form tunneling estimates: the exchange-time scaling law, the
//! effective end-to-end coupling and the second-order 4-site propagator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::propagator::{phase_accurate_exp, Propagator};
use crate::topology::ScaledParams;

/// Exchange time together with any regime caveats.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticEstimate {
    pub tau_ex: f64,
    pub warnings: Vec<String>,
}

fn regime_warnings(n: usize, p: &ScaledParams, leading: bool) -> Vec<String> {
    let mut w = Vec::new();
    if !p.flags.mu_small {
        w.push(format!("mu = {:.3e} is not small", p.mu));
    }
    if !p.flags.eta_small {
        w.push(format!("eta = {:.3e} is not small", p.eta));
    }
    if leading && !p.flags.eps_mu_sq_small {
        w.push("(epsilon*mu)^2 is not small; leading order is unreliable".into());
    }
    if n > 6 {
        w.push(format!("N = {n} is beyond the N <= 6 derivation; value is an extrapolation"));
    }
    w
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    Ok(())
}

/// `π / (2 ε^{N−3} μ^{N−2})`; `π/2` for two oscillators.
pub fn leading_order_tau_ex(n: usize, params: &ScaledParams, epsilon: f64) -> Result<AnalyticEstimate> {
    check_n(n)?;
    if n == 2 {
        return Ok(AnalyticEstimate {
            tau_ex: std::f64::consts::FRAC_PI_2,
            warnings: vec![],
        });
    }
    let k = n as i32;
    let tau_ex = std::f64::consts::PI / (2.0 * epsilon.powi(k - 3) * params.mu.powi(k - 2));
    Ok(AnalyticEstimate {
        tau_ex,
        warnings: regime_warnings(n, params, true),
    })
}

/// Second-order coefficient `[𝒜 + ℬη² − 𝒞ε²]μ²` with `𝒜 = N−1`,
/// `ℬ = Σ_{m=1}^{N−2} m`, `𝒞 = N−3`.
pub fn second_order_correction(n: usize, params: &ScaledParams, epsilon: f64) -> f64 {
    let a = (n - 1) as f64;
    let b = ((n - 2) * (n - 1) / 2) as f64;
    let c = n as f64 - 3.0;
    (a + b * params.eta.powi(2) - c * epsilon.powi(2)) * params.mu.powi(2)
}

/// Leading order times `1 + second_order_correction`.
pub fn analytic_tau_ex(n: usize, params: &ScaledParams, epsilon: f64) -> Result<AnalyticEstimate> {
    let lead = leading_order_tau_ex(n, params, epsilon)?;
    if n == 2 {
        return Ok(lead);
    }
    let factor = 1.0 + second_order_correction(n, params, epsilon);
    let mut warnings = regime_warnings(n, params, false);
    if factor <= 0.0 {
        warnings.push(format!("second-order factor {factor:.3} is not positive; expansion has broken down"));
    }
    for w in &warnings {
        log::warn!("analytic exchange time: {w}");
    }
    Ok(AnalyticEstimate {
        tau_ex: lead.tau_ex * factor,
        warnings,
    })
}

/// `π / (2 τ_ex)` in units of the end coupling.
///
/// For N = 3 this is `μ`; the `2μλ` sometimes quoted alongside
/// `τ_ex = π/(2μ)` corresponds to a `π/τ_ex` convention.
pub fn effective_coupling(n: usize, params: &ScaledParams, epsilon: f64) -> Result<f64> {
    if n == 2 {
        return Ok(1.0);
    }
    Ok(std::f64::consts::FRAC_PI_2 / analytic_tau_ex(n, params, epsilon)?.tau_ex)
}

/// Second-order-in-μ propagator of the 4-site tunneling chain.
pub fn perturbative_theta4(params: &ScaledParams, epsilon: f64, tau: f64) -> Propagator {
    let mu = params.mu;
    let eta = params.eta;
    let slow = epsilon * mu * mu * tau;
    let (cs, sn) = (slow.cos(), slow.sin());
    let (decay, ok1) = phase_accurate_exp(Complex64::new(eta, 1.0 / mu), tau);
    let fast = epsilon * tau;
    let hc = decay * fast.cos();
    let hs = decay * fast.sin();
    let gc = mu * (cs - hc);
    let gs = mu * (sn - hs);
    let (pre, ok2) = phase_accurate_exp(Complex64::new(eta * mu * mu, params.varpi - mu), tau);
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let m = ndarray::array![
        [one * cs, -gc, i * gs, -i * sn],
        [-gc, hc, -i * hs, i * gs],
        [i * gs, -i * hs, hc, -gc],
        [-i * sn, i * gs, -gc, one * cs],
    ];
    let matrix: CMatrix = m.mapv(|z| pre * z);
    Propagator {
        time: tau,
        matrix,
        precise: ok1 && ok2,
    }
}
