#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64;
use qpst::topology::{ChainSpec, NetworkTopology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected network with 2..=6 modes: a spanning path plus a few
/// extra bonds, and a random positive semidefinite damping matrix (or
/// none, or diagonal).
pub fn random_topology(rng: &mut ChaCha8Rng) -> NetworkTopology {
    let n = rng.random_range(2..=6);
    let omega: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
    let mut lambda = Array2::zeros((n, n));
    for m in 0..n - 1 {
        let v = rng.random_range(0.2..1.5);
        lambda[[m, m + 1]] = v;
        lambda[[m + 1, m]] = v;
    }
    for _ in 0..rng.random_range(0..n) {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            let v = rng.random_range(-1.0..1.0);
            lambda[[i, j]] = v;
            lambda[[j, i]] = v;
        }
    }
    let gamma = match rng.random_range(0..3) {
        0 => Array2::zeros((n, n)),
        1 => Array2::from_diag(&ndarray::Array1::from_iter((0..n).map(|_| rng.random_range(0.0..0.3)))),
        _ => {
            let a = Array2::from_shape_fn((n, n), |_| rng.random_range(-0.3..0.3));
            a.dot(&a.t())
        }
    };
    NetworkTopology::new(omega, lambda, gamma).expect("valid random topology")
}

pub fn random_chain(rng: &mut ChaCha8Rng) -> ChainSpec {
    ChainSpec {
        n: rng.random_range(2..=8),
        omega_end: rng.random_range(0.0..5.0),
        omega_mid: rng.random_range(5.5..50.0),
        lambda_end: rng.random_range(0.5..2.0),
        epsilon: rng.random_range(0.1..5.0),
        gamma_mid: rng.random_range(0.0..0.1),
    }
}

pub fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// Frobenius norm of `a − b`.
pub fn frob_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
