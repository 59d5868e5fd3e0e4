mod common;

use std::f64::consts::FRAC_PI_2;

use common::c;
use ndarray::array;
use qpst::coherent::make_cat;
use qpst::linalg::CMatrix;
use qpst::topology::{build_chain, build_general, build_pst_chain, ChainSpec, NetworkTopology, ScaledParams};
use qpst::transfer::{
    analytic_tau_ex, check_pst_target, commutator_residual, effective_coupling, exchange_time_numeric,
    exchange_time_spectral, perturbative_theta4, raw_peak_near, transfer_curve, PermutationTarget, SampleMode,
    TransferScenario,
};
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
fn commutator_examples() {
    let g = build_general(&build_chain(&fig1(5)).unwrap());
    let theta = qpst::propagator::theta_at(&g, 123.4).unwrap().matrix;
    assert!(commutator_residual(&theta, &g).unwrap() <= 1e-9);
    let p: CMatrix = PermutationTarget::anti_diagonal(5).to_complex();
    assert!(commutator_residual(&p, &g).unwrap() <= 1e-12);
    let lopsided = NetworkTopology::ideal(
        vec![1.0, 2.0, 3.0],
        array![[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
    )
    .unwrap();
    assert!(commutator_residual(&PermutationTarget::anti_diagonal(3).to_complex(), &build_general(&lopsided)).unwrap() > 0.1);
}

#[test]
fn pst_target_examples() {
    let pp = build_general(&build_pst_chain(4, 1.0, 0.0).unwrap());
    assert!(check_pst_target(&pp, FRAC_PI_2, &PermutationTarget::anti_diagonal(4), 1e-8).unwrap().passed);
    assert!(!check_pst_target(&pp, 0.0, &PermutationTarget::anti_diagonal(4), 1e-8).unwrap().passed);
    let g = build_general(&build_chain(&fig1(5)).unwrap());
    let p = ScaledParams::from_scaled(1e-4, 1e-3, 10.0, 5_000.0);
    let tau = analytic_tau_ex(5, &p, 5_000.0).unwrap().tau_ex;
    assert!(check_pst_target(&g, tau, &PermutationTarget::corner(5), 0.05).unwrap().passed);
}

#[test]
fn pst_implies_mirror_commutation() {
    for n in 2..=7 {
        let g = build_general(&build_pst_chain(n, 1.0, 0.3).unwrap());
        let ex = exchange_time_numeric(&g, (0.1, 3.0), 1e-12).unwrap();
        let target = PermutationTarget::anti_diagonal(n);
        assert!(check_pst_target(&g, ex.tau_ex, &target, 1e-6).unwrap().passed);
        assert!(commutator_residual(&target.to_complex(), &g).unwrap() <= 1e-10);
    }
}

#[test]
fn exchange_time_examples() {
    let two = build_general(&build_pst_chain(2, 1.0, 0.0).unwrap());
    assert!((exchange_time_numeric(&two, (0.1, 3.0), 1e-12).unwrap().tau_ex - FRAC_PI_2).abs() < 1e-6);
    assert!((exchange_time_spectral(&two, (0.1, 3.0)).unwrap().tau_ex - FRAC_PI_2).abs() < 1e-9);

    let four = build_general(&build_chain(&fig1(4)).unwrap());
    let ex = exchange_time_numeric(&four, (1.0, 1e5), 1e-12).unwrap();
    // end modes shift by 1/(Δ ∓ ε) in the two mirror sectors
    let split = 1.0 / 5_000.0 - 1.0 / 15_000.0;
    let second_order = std::f64::consts::PI / split;
    assert!((ex.tau_ex / second_order - 1.0).abs() < 1e-3, "{} vs {second_order}", ex.tau_ex);

    let five = build_general(&build_chain(&fig1(5)).unwrap());
    let ex = exchange_time_numeric(&five, (1.0, 1e5), 1e-12).unwrap();
    assert!((ex.tau_ex / (std::f64::consts::PI * 1e4) - 1.0).abs() < 0.2);

    let pp = build_general(&build_pst_chain(5, 1.0, 0.0).unwrap());
    let a = exchange_time_numeric(&pp, (0.1, 3.0), 1e-12).unwrap().tau_ex;
    let b = exchange_time_spectral(&pp, (0.1, 3.0)).unwrap().tau_ex;
    assert!((a - b).abs() / b < 1e-6);

    let damped = build_general(&build_chain(&fig1(5)).unwrap());
    assert!(matches!(exchange_time_spectral(&damped, (1.0, 1e5)), Err(Error::InvalidParameter(_))));
}

#[test]
fn spectral_and_numeric_agree_on_undamped_tunneling_chain() {
    let ideal = ChainSpec { gamma_mid: 0.0, ..fig1(5) };
    let g = build_general(&build_chain(&ideal).unwrap());
    let numeric = exchange_time_numeric(&g, (1.0, 1e5), 1e-12).unwrap();
    match exchange_time_spectral(&g, (1.0, 1e5)) {
        Ok(s) => assert!((s.tau_ex - numeric.tau_ex).abs() / numeric.tau_ex < 1e-4),
        // the corner phase at the envelope peak need not sit on the π/2 lattice
        Err(e) => assert_eq!(e, Error::NoSpectralRoot),
    }
}

#[test]
fn analytic_examples() {
    let p = ScaledParams::from_scaled(1e-4, 1e-3, 10.0, 5_000.0);
    let est = analytic_tau_ex(5, &p, 5_000.0).unwrap().tau_ex;
    assert!((est / (std::f64::consts::PI * 1e4) - 1.0).abs() < 1e-3);

    let p3 = ScaledParams::from_scaled(1e-2, 0.0, 1.0, 1.0);
    let lead = qpst::transfer::leading_order_tau_ex(3, &p3, 1.0).unwrap().tau_ex;
    assert!((lead - 50.0 * std::f64::consts::PI).abs() < 1e-9);

    let p6 = ScaledParams::from_scaled(1e-3, 0.0, 1.0, 10.0);
    let want = std::f64::consts::PI / (2.0 * 1e3 * 1e-12) * (1.0 + (5.0 - 300.0) * 1e-6);
    assert!((analytic_tau_ex(6, &p6, 10.0).unwrap().tau_ex / want - 1.0).abs() < 1e-12);

    let p4 = ScaledParams::from_scaled(1e-2, 0.0, 1.0, 10.0);
    assert!((effective_coupling(4, &p4, 10.0).unwrap() / 1e-3 - 1.0).abs() < 0.05);
    assert_eq!(effective_coupling(2, &p4, 10.0).unwrap(), 1.0);
    assert!((effective_coupling(5, &p, 5_000.0).unwrap() / 5e-5 - 1.0).abs() < 1e-3);
}

#[test]
fn theta4_at_zero_is_near_identity() {
    let p = ScaledParams::from_scaled(1e-3, 1e-2, 10.0, 10.0);
    let t = perturbative_theta4(&p, 10.0, 0.0).matrix;
    for i in 0..4 {
        assert!((t[[i, i]] - c(1.0)).norm() < 1e-12);
    }
    assert!(t[[0, 1]].norm() < 1e-12);
}

#[test]
fn curve_starts_from_the_cat() {
    let g = build_general(&build_chain(&fig1(5)).unwrap());
    let alpha = 1.2;
    let cat = make_cat(5, 1, c(alpha), c(0.0)).unwrap();
    let n2 = cat.norm_sq();
    let s = TransferScenario::end_to_end(&g, cat).unwrap();
    let curve = transfer_curve(&s, &[0.0, 1.0], SampleMode::Raw).unwrap();
    assert!((curve.p_rec[0] - 1.0).abs() < 1e-12);
    assert!((curve.p_ex[0] - 4.0 * n2 * (-alpha * alpha).exp()).abs() < 1e-12);
}

#[test]
fn damping_never_helps() {
    let peak = |gamma: f64| {
        let spec = ChainSpec { gamma_mid: gamma, ..fig1(5) };
        let g = build_general(&build_chain(&spec).unwrap());
        let ex = exchange_time_numeric(&g, (1.0, 1e5), 1e-12).unwrap();
        let s = TransferScenario::end_to_end(&g, make_cat(5, 1, c(5.0), c(0.0)).unwrap()).unwrap();
        raw_peak_near(&s, ex.tau_ex, 3.0, 2001, false).unwrap().p_ex
    };
    let (a, b, d) = (peak(0.0), peak(1e-3), peak(1e-2));
    assert!(a >= b && b >= d, "{a} {b} {d}");
}

#[test]
fn larger_cats_lose_more() {
    let spec = ChainSpec {
        n: 10,
        omega_end: 10.0,
        omega_mid: 2_010.0,
        lambda_end: 1.0,
        epsilon: 800.0,
        gamma_mid: 1e-3,
    };
    let g = build_general(&build_chain(&spec).unwrap());
    let ex = exchange_time_numeric(&g, (1.0, 1e6), 1e-12).unwrap();
    let peak = |alpha: f64| {
        let s = TransferScenario::end_to_end(&g, make_cat(10, 1, c(alpha), c(0.0)).unwrap()).unwrap();
        raw_peak_near(&s, ex.tau_ex, 3.0, 2001, false).unwrap().p_ex
    };
    assert!(peak(10.0) <= peak(5.0));
}

#[test]
fn ideal_engineered_chains_transfer_perfectly() {
    for n in 2..=8 {
        let g = build_general(&build_pst_chain(n, 1.0, (n - 1) as f64).unwrap());
        let s = TransferScenario::end_to_end(&g, make_cat(n, 1, c(2.0), c(0.0)).unwrap()).unwrap();
        let p = s.point(FRAC_PI_2, SampleMode::Raw).unwrap().p_ex;
        assert!((p - 1.0).abs() <= 1e-6, "N={n}: {p}");
    }
}

#[test]
fn recurrence_with_excited_transmitters_gives_half() {
    let g = build_general(&build_chain(&fig1(5)).unwrap());
    let ex = exchange_time_numeric(&g, (1.0, 1e5), 1e-12).unwrap();
    let s = TransferScenario::end_to_end(&g, make_cat(5, 1, c(5.0), c(5.0)).unwrap()).unwrap();
    let p = raw_peak_near(&s, 2.0 * ex.tau_ex, 3.0, 4001, false).unwrap();
    assert!((p.p_ex - 0.5).abs() < 0.1, "{}", p.p_ex);
}

#[test]
fn fig5_decays() {
    let mut gamma = ndarray::Array2::zeros((5, 5));
    for m in 1..4 {
        gamma[[m, m]] = 1e-3;
    }
    let t = build_pst_chain(5, 1.0, 10.0).unwrap().with_gamma(gamma).unwrap();
    let s = TransferScenario::end_to_end(&build_general(&t), make_cat(5, 1, c(5.0), c(0.0)).unwrap()).unwrap();
    assert!(raw_peak_near(&s, 2000.0, 10.0, 4001, false).unwrap().p_ex <= 0.1);
}
