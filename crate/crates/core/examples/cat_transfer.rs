//! Sends an even cat state across a tunneling chain and locates the
//! exchange time and the transfer peak.

use num_complex::Complex64;
use qpst::coherent::make_cat;
use qpst::topology::{build_chain, build_general, ChainSpec};
use qpst::transfer::{exchange_time_numeric, raw_peak_near, TransferScenario};

fn main() -> qpst::Result<()> {
    let spec = ChainSpec {
        n: 5,
        omega_end: 10.0,
        omega_mid: 10_010.0,
        lambda_end: 1.0,
        epsilon: 5_000.0,
        gamma_mid: 1e-3,
    };
    let gen = build_general(&build_chain(&spec)?);
    let ex = exchange_time_numeric(&gen, (1.0, 1e5), 1e-12)?;
    println!("tau_ex = {:.2}  |Theta_N1|^2 = {:.6}", ex.tau_ex, ex.peak_p);
    let cat = make_cat(5, 1, Complex64::new(5.0, 0.0), Complex64::new(0.0, 0.0))?;
    let scenario = TransferScenario::end_to_end(&gen, cat)?;
    let peak = raw_peak_near(&scenario, ex.tau_ex, 5.0, 2001, false)?;
    println!("p_ex peaks at {:.6} (tau = {:.3})", peak.p_ex, peak.tau);
    let back = raw_peak_near(&scenario, 2.0 * ex.tau_ex, 5.0, 2001, true)?;
    println!("p_rec on return: {:.6} (tau = {:.3})", back.p_rec, back.tau);
    Ok(())
}
