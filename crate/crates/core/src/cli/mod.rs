//! Scenario files, sweeps and report artifacts behind the `qpst` binary.

mod config;
mod plot;
mod scenario;
mod suite;

pub use config::{
    ChainConfig, ChainKind, ComplexValue, ConfigError, Expectations, InitialConfig, OutputsConfig, Quantity,
    ScanConfig, ScanMode, ScenarioConfig, Spacing, Units, WindowExpectation, SCHEMA_VERSION,
};
pub use plot::emit_plot_script;
pub use scenario::{build_network, run_config, run_scenario, Check, RunOptions, ScenarioOutcome};
pub use suite::{run_suite, summary_text, SuiteEntry, SuiteReport};
