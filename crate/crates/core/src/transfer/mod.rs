//! Transfer criteria, exchange times and transfer/recurrence curves.

mod analytic;
mod curve;
mod exchange;
mod pst;

pub use analytic::{
    analytic_tau_ex, effective_coupling, leading_order_tau_ex, perturbative_theta4, second_order_correction,
    AnalyticEstimate,
};
pub use curve::{raw_peak_near, transfer_curve, SampleMode, TransferCurve, TransferPoint, TransferScenario, BRANCH_WARN_LIMIT};
pub use exchange::{
    exchange_time_numeric, exchange_time_numeric_between, exchange_time_spectral, ExchangeMethod, ExchangeReport,
    MAX_SCAN_SAMPLES, MIN_TRANSFER_PEAK, SLOW_WEIGHT_FRACTION, SPECTRAL_TOL,
};
pub use pst::{check_pst_target, commutator_residual, PermutationTarget, PstCheck};
