//! Exchange time against chain length: closed form versus numeric peak,
//! with the matching effective end-to-end coupling.

use qpst::topology::{build_chain, build_general, ScaledParams};
use qpst::transfer::{analytic_tau_ex, effective_coupling, exchange_time_numeric, leading_order_tau_ex};

fn main() -> qpst::Result<()> {
    let mu = 1e-3;
    let epsilon = 0.05 / mu;
    let params = ScaledParams::from_scaled(mu, 1e-3, 1.0, epsilon);
    println!("{:>3} {:>14} {:>14} {:>14} {:>9} {:>12}", "N", "leading", "second order", "numeric", "rel err", "lambda_eff");
    for n in 3..=6 {
        let gen = build_general(&build_chain(&params.chain(n, epsilon))?);
        let lead = leading_order_tau_ex(n, &params, epsilon)?;
        let est = analytic_tau_ex(n, &params, epsilon)?;
        let hi = 3.0 * lead.tau_ex;
        let num = exchange_time_numeric(&gen, (1.0, hi), 1e-12)?;
        println!(
            "{n:>3} {:>14.6e} {:>14.6e} {:>14.6e} {:>9.2e} {:>12.4e}",
            lead.tau_ex,
            est.tau_ex,
            num.tau_ex,
            (est.tau_ex - num.tau_ex).abs() / num.tau_ex,
            effective_coupling(n, &params, epsilon)?
        );
    }
    Ok(())
}
