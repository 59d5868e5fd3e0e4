use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qpst::cli::{emit_plot_script, run_scenario, run_suite, summary_text, RunOptions};

#[derive(Parser)]
#[command(name = "qpst", version, about = "Coherent-state transfer scenarios through oscillator chains")]
struct Cli {
    /// Keep samples whose accumulated phase exceeds the double-precision budget
    #[arg(long, global = true)]
    allow_imprecise: bool,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory (default: next to the input)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file
    Run { config: PathBuf },
    /// Run every scenario file in a directory
    Suite { dir: PathBuf },
    /// Write a matplotlib script for a curve CSV
    Plot { csv: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let opts = RunOptions {
        allow_imprecise: cli.allow_imprecise,
        out_dir: cli.out.clone(),
    };
    let result = match &cli.command {
        Command::Run { config } => run_scenario(config, &opts).map(|o| {
            for c in &o.checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "fail" }, c.name, c.detail);
            }
            println!("wrote {}", o.csv_path.display());
            println!("wrote {}", o.summary_path.display());
            o.passed()
        }),
        Command::Suite { dir } => run_suite(dir, &opts).map(|r| {
            print!("{}", summary_text(&r));
            r.passed
        }),
        Command::Plot { csv } => emit_plot_script(csv, cli.out.as_deref()).map(|p| {
            println!("wrote {}", p.display());
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
