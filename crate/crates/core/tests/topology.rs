mod common;

use common::{random_chain, rng};
use ndarray::array;
use num_complex::Complex64;
use proptest::prelude::*;
use qpst::topology::{build_chain, build_general, build_pst_chain, scaled_params, ChainSpec, NetworkTopology};
use qpst::Error;

fn fig1(n: usize) -> ChainSpec {
    ChainSpec {
        n,
        omega_end: 10.0,
        omega_mid: 10_010.0,
        lambda_end: 1.0,
        epsilon: 5_000.0,
        gamma_mid: 1e-3,
    }
}

#[test]
fn general_builder_substitutes_directly() {
    let t = NetworkTopology::ideal(vec![1.0, 1.0], array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
    let g = build_general(&t);
    assert!(g.is_ideal());
    assert!(g.matrix().iter().all(|z| *z == Complex64::new(0.0, 1.0)));

    let t = NetworkTopology::new(
        vec![2.0, 5.0, 2.0],
        array![[0.0, 0.1, 0.0], [0.1, 0.0, 0.1], [0.0, 0.1, 0.0]],
        array![[0.0, 0.0, 0.0], [0.0, 0.01, 0.0], [0.0, 0.0, 0.0]],
    )
    .unwrap();
    let m = build_general(&t).matrix().clone();
    let want = array![
        [Complex64::new(0.0, 2.0), Complex64::new(0.0, 0.1), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.1), Complex64::new(0.005, 5.0), Complex64::new(0.0, 0.1)],
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.1), Complex64::new(0.0, 2.0)],
    ];
    assert_eq!(m, want);
}

#[test]
fn fig1_four_site_structure() {
    let g = build_general(&build_chain(&fig1(4)).unwrap());
    let m = g.matrix();
    let i = |x: f64| Complex64::new(0.0, x);
    assert_eq!(m[[0, 0]], i(10.0));
    assert_eq!(m[[1, 1]], Complex64::new(5e-4, 10_010.0));
    assert_eq!(m[[0, 1]], i(1.0));
    assert_eq!(m[[1, 2]], i(5_000.0));
    assert_eq!(m[[2, 3]], i(1.0));
    assert_eq!(m[[0, 2]], i(0.0));
    assert_eq!(m[[3, 0]], i(0.0));
}

#[test]
fn two_site_chain_ignores_transmitters() {
    let spec = ChainSpec {
        n: 2,
        omega_end: 10.0,
        omega_mid: 0.0,
        lambda_end: 1.0,
        epsilon: 0.0,
        gamma_mid: 0.0,
    };
    let t = build_chain(&spec).unwrap();
    assert_eq!(t.hamiltonian(), array![[10.0, 1.0], [1.0, 10.0]]);
    assert!(t.is_ideal());
}

#[test]
fn unit_epsilon_gives_uniform_bonds() {
    let spec = ChainSpec { epsilon: 1.0, ..fig1(5) };
    assert!(build_chain(&spec).unwrap().bonds().iter().all(|&b| b == 1.0));
}

#[test]
fn pst_bonds() {
    let b = build_pst_chain(4, 1.0, 0.0).unwrap().bonds();
    assert!((b[0] - 3f64.sqrt()).abs() < 1e-15 && b[1] == 2.0 && (b[2] - 3f64.sqrt()).abs() < 1e-15);
    assert_eq!(build_pst_chain(2, 1.0, 0.0).unwrap().bonds(), vec![1.0]);
    let b = build_pst_chain(5, 1.0, 0.0).unwrap().bonds();
    assert_eq!(b[0], 2.0);
    assert!((b[1] - 6f64.sqrt()).abs() < 1e-15);
    assert!(matches!(build_pst_chain(1, 1.0, 0.0), Err(Error::InvalidTopology(_))));
    assert!(build_pst_chain(3, 0.0, 0.0).is_err());
}

#[test]
fn scaled_parameter_examples() {
    let p = scaled_params(&fig1(5)).unwrap();
    assert!((p.mu - 1e-4).abs() < 1e-18);
    assert_eq!(p.eta, 1e-3);
    assert_eq!(p.delta_minus, 1e4);
    let same = ChainSpec { omega_mid: 10.0, ..fig1(5) };
    assert!(scaled_params(&same).is_err());
    let loose = ChainSpec {
        omega_end: 0.0,
        omega_mid: 10.0,
        lambda_end: 2.0,
        ..fig1(5)
    };
    let p = scaled_params(&loose).unwrap();
    assert!((p.mu - 0.2).abs() < 1e-15);
    assert!(!p.flags.mu_small);
}

#[test]
fn topology_validation() {
    assert!(NetworkTopology::ideal(vec![1.0], array![[0.0]]).is_err());
    assert!(NetworkTopology::ideal(vec![1.0, 1.0], array![[0.0, 1.0], [0.5, 0.0]]).is_err());
    assert!(NetworkTopology::ideal(vec![1.0, 1.0], array![[1.0, 1.0], [1.0, 0.0]]).is_err());
    let not_psd = NetworkTopology::new(vec![1.0, 1.0], array![[0.0, 1.0], [1.0, 0.0]], array![[0.1, 0.5], [0.5, 0.1]]);
    assert!(not_psd.is_err());
}

proptest! {
    #[test]
    fn chains_are_tridiagonal_and_mirror_symmetric(seed in any::<u64>()) {
        let spec = random_chain(&mut rng(seed));
        let g = build_general(&build_chain(&spec).unwrap());
        let m = g.matrix();
        let n = spec.n;
        prop_assert!(g.is_mirror_symmetric());
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > 1 {
                    prop_assert_eq!(m[[i, j]], Complex64::new(0.0, 0.0));
                }
                if i != j || i == 0 || i == n - 1 {
                    prop_assert_eq!(m[[i, j]].re, 0.0);
                }
                prop_assert_eq!(m[[i, j]], m[[n - 1 - i, n - 1 - j]]);
            }
        }
    }

    #[test]
    fn pst_bonds_are_palindromic(n in 2usize..40, lambda in 0.01..10.0f64) {
        let b = build_pst_chain(n, lambda, 1.0).unwrap().bonds();
        for m in 0..b.len() {
            prop_assert_eq!(b[m], b[b.len() - 1 - m]);
        }
    }

    #[test]
    fn undamped_generators_are_anti_hermitian(seed in any::<u64>()) {
        let spec = ChainSpec { gamma_mid: 0.0, ..random_chain(&mut rng(seed)) };
        let g = build_general(&build_chain(&spec).unwrap());
        prop_assert!(g.is_ideal());
        let m = g.matrix();
        for ((i, j), z) in m.indexed_iter() {
            prop_assert!((z + m[[j, i]].conj()).norm() <= 1e-15);
        }
    }
}
