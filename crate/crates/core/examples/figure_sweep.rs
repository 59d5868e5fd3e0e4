//! Runs the shipped figure scenarios into a temporary directory and prints
//! the suite summary.

use std::path::Path;

use qpst::cli::{run_suite, summary_text, RunOptions};

fn main() -> anyhow::Result<()> {
    let figures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../figures");
    let out = std::env::temp_dir().join("qpst-figures");
    let report = run_suite(
        &figures,
        &RunOptions {
            allow_imprecise: false,
            out_dir: Some(out.clone()),
        },
    )?;
    print!("{}", summary_text(&report));
    println!("artifacts in {}", out.display());
    Ok(())
}
