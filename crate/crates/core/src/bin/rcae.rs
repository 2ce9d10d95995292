use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rcae::harness::config::parse_estimators;
use rcae::harness::{
    export_log, read_log_csv, replay_log, run_simulated, simulate_measurements, write_log_csv,
    write_run_csv, write_summary_table, EstimatorKind, RunResult, ScenarioConfig,
};
use rcae::HarnessError;

#[derive(Parser)]
#[command(name = "rcae", version, about = "Attitude estimation experiments: RCAE, MEKF and dead reckoning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the synthetic scenario and write the per-step table.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Comma-separated subset of rcae,mekf,dead_reckon.
        #[arg(long)]
        estimators: Option<String>,
        /// Also write the simulated IMU log for later replay.
        #[arg(long)]
        log_out: Option<PathBuf>,
    },
    /// Replay a recorded IMU log.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all estimators on the reference scenario; write one table per
    /// estimator and summary.txt.
    Compare {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, HarnessError> {
    path.map_or_else(|| Ok(ScenarioConfig::default()), ScenarioConfig::from_file)
}

fn report(result: &RunResult) -> Result<(), HarnessError> {
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    for f in &result.failures {
        eprintln!("error: {} failed at row {}: {}", f.estimator, f.row, f.message);
    }
    if result.all_failed() {
        return Err(HarnessError::AllEstimatorsFailed(
            result.failures.iter().map(|f| f.message.as_str()).collect::<Vec<_>>().join("; "),
        ));
    }
    Ok(())
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Simulate {
            config,
            out,
            seed,
            duration,
            dt,
            estimators,
            log_out,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(seed) = seed {
                cfg.noise.seed = seed;
            }
            if let Some(d) = duration {
                cfg.duration = d;
            }
            if let Some(dt) = dt {
                cfg.dt = dt;
                cfg.rcae.dt = dt;
                cfg.mekf.dt = dt;
            }
            if let Some(list) = estimators {
                cfg.estimators = parse_estimators(&list)?;
            }
            cfg.validate()?;
            let samples = simulate_measurements(&cfg)?;
            let result = run_simulated(&samples, &cfg)?;
            report(&result)?;
            write_run_csv(&out, &result, &cfg.estimators)?;
            if let Some(log) = log_out {
                write_log_csv(&log, &export_log(&samples))?;
            }
            Ok(())
        }
        Command::Replay { log, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let records = read_log_csv(&log)?;
            let result = replay_log(&records, &cfg)?;
            report(&result)?;
            write_run_csv(&out, &result, &cfg.estimators)
        }
        Command::Compare { out_dir, config } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.estimators = EstimatorKind::ALL.to_vec();
            std::fs::create_dir_all(&out_dir).map_err(|source| HarnessError::Io {
                path: out_dir.display().to_string(),
                source,
            })?;
            let samples = simulate_measurements(&cfg)?;
            let result = run_simulated(&samples, &cfg)?;
            report(&result)?;
            for kind in EstimatorKind::ALL {
                write_run_csv(&out_dir.join(format!("{}.csv", kind.name())), &result, &[kind])?;
            }
            write_summary_table(&out_dir.join("summary.txt"), &result)?;
            print!("{}", rcae::harness::output::render_summary_table(&result));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
