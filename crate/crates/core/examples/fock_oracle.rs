//! Cross-checks the coherent-state transfer probability against a
//! brute-force Lindblad integration in truncated Fock space.

use num_complex::Complex64;
use qpst::coherent::make_cat;
use qpst::fockoracle::{encode_coherent, fock_overlap, FockBasis, LindbladIntegrator};
use qpst::topology::{build_chain, build_general, ChainSpec};
use qpst::transfer::{SampleMode, TransferScenario};

fn main() -> qpst::Result<()> {
    let spec = ChainSpec {
        n: 3,
        omega_end: 0.5,
        omega_mid: 1.0,
        lambda_end: 1.0,
        epsilon: 1.0,
        gamma_mid: 0.05,
    };
    let topo = build_chain(&spec)?;
    let cat = make_cat(3, 1, Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.0))?;
    let scenario = TransferScenario::end_to_end(&build_general(&topo), cat.clone())?;

    let basis = FockBasis::new(3, 10)?;
    let (rho0, defect) = encode_coherent(&cat, &basis)?;
    let sender = rho0.reduce(1)?;
    let integrator = LindbladIntegrator::new(&basis, &topo)?;
    println!("basis size {}, truncated norm {defect:.1e}", basis.dim());

    let times: Vec<f64> = (0..=10).map(|k| 2.0 * k as f64).collect();
    let states = integrator.sample(&rho0, &times)?;
    for (t, rho) in times.iter().zip(&states) {
        let fock = fock_overlap(&sender, &rho.reduce(3)?)?;
        let coherent = scenario.point(*t, SampleMode::Raw)?.p_ex;
        println!("tau = {t:>4}  coherent {coherent:.8}  fock {fock:.8}  diff {:.1e}", (coherent - fock).abs());
    }
    Ok(())
}
