use std::process::ExitCode;

use clap::Parser;
use clap::error::ErrorKind;
use zeno_lab::{run_experiment, write_report, Cli, ExperimentConfig, LabError};

fn threads_from_env() -> Result<Option<usize>, LabError> {
    match std::env::var("ZENO_LAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(LabError::Usage(format!("ZENO_LAB_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<bool, LabError> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LabError::Contract(format!("thread pool: {e}")))?;
    }
    let cfg = ExperimentConfig::from_cli(cli)?;
    log::info!("running {} (config sha256:{})", cfg.experiment.name(), cfg.hash());
    let report = run_experiment(&cfg)?;
    for path in write_report(&report, &cfg.out_dir)? {
        println!("wrote {}", path.display());
    }
    for check in &report.checks {
        let status = if check.passed { "ok" } else { "FAILED" };
        println!("check {status}: {} ({})", check.name, check.detail);
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("zeno-lab: one or more contract checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("zeno-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
