//! `exp(-w τ)` with the oscillatory phase reduced in extended precision.

use num_complex::Complex64;

/// Above this |Im(w) τ| the product itself no longer pins the phase to
/// better than a few ulps of 2π and results are flagged imprecise.
pub const PHASE_LIMIT: f64 = 1e12;

// 2π as an unevaluated sum of three doubles.
const TWO_PI_1: f64 = std::f64::consts::TAU;
const TWO_PI_2: f64 = 2.4492935982947064e-16;
const TWO_PI_3: f64 = -5.989539619436679e-33;

/// Exact product as `hi + lo`.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    (hi, a.mul_add(b, -hi))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `φ mod 2π` in `[-π, π]` for `φ = a·b` carried exactly.
pub fn reduced_phase(a: f64, b: f64) -> f64 {
    let (hi, lo) = two_prod(a, b);
    if !hi.is_finite() {
        return f64::NAN;
    }
    let k = (hi / TWO_PI_1).round();
    if k == 0.0 {
        return hi + lo;
    }
    let (p1, e1) = two_prod(k, TWO_PI_1);
    let (p2, e2) = two_prod(k, TWO_PI_2);
    // hi - p1 is exact since both lie within a factor two of each other
    let head = hi - p1;
    let (s, t) = two_sum(head, lo);
    let (s, t2) = two_sum(s, -e1);
    let (s, t3) = two_sum(s, -p2);
    s + (t + t2 + t3 - e2 - k * TWO_PI_3)
}

/// `exp(-w τ)` and whether the phase was resolved to full precision.
pub fn phase_accurate_exp(w: Complex64, tau: f64) -> (Complex64, bool) {
    let magnitude = (-w.re * tau).exp();
    let raw = w.im * tau;
    let precise = raw.abs() <= PHASE_LIMIT;
    let phi = reduced_phase(w.im, tau);
    let (s, c) = phi.sin_cos();
    (Complex64::new(magnitude * c, -magnitude * s), precise)
}
