//! Builds the dissipative generator of a tunneling chain and prints its
//! scaled parameters and regime flags.

use qpst::topology::{build_chain, build_general, scaled_params, ChainSpec};

fn main() -> qpst::Result<()> {
    let spec = ChainSpec {
        n: 5,
        omega_end: 10.0,
        omega_mid: 10_010.0,
        lambda_end: 1.0,
        epsilon: 5_000.0,
        gamma_mid: 1e-3,
    };
    let topo = build_chain(&spec)?;
    let gen = build_general(&topo);
    let p = scaled_params(&spec)?;
    println!("mu = {:.3e}  eta = {:.3e}  varpi = {}", p.mu, p.eta, p.varpi);
    println!("regime: {:?}", p.flags);
    println!("bonds: {:?}", topo.bonds());
    println!("mirror symmetric: {}", gen.is_mirror_symmetric());
    for row in gen.matrix().rows() {
        let cells: Vec<String> = row.iter().map(|z| format!("{:>9.3e}{:+.3e}i", z.re, z.im)).collect();
        println!("{}", cells.join("  "));
    }
    Ok(())
}
