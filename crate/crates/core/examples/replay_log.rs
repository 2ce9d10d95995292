//! Replays an IMU CSV log through all estimators. Without an argument, a
//! short synthetic log is generated and replayed.

use std::path::PathBuf;

use rcae::harness::output::render_summary_table;
use rcae::harness::*;

fn main() {
    let cfg = ScenarioConfig {
        duration: 5.0,
        ..ScenarioConfig::default()
    };
    let dir = std::env::temp_dir();
    let log = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let path = dir.join("rcae_example_log.csv");
            let samples = simulate_measurements(&cfg).unwrap();
            write_log_csv(&path, &export_log(&samples)).unwrap();
            println!("wrote synthetic log to {}", path.display());
            path
        }
    };

    let records = read_log_csv(&log).unwrap();
    println!("{} records, truth present: {}", records.len(), records.iter().all(|r| r.truth_quat.is_some()));
    let result = replay_log(&records, &cfg).unwrap();
    for w in &result.warnings {
        println!("warning: {w}");
    }
    print!("{}", render_summary_table(&result));

    let out = dir.join("rcae_example_replay.csv");
    write_run_csv(&out, &result, &result.estimators).unwrap();
    println!("run table written to {}", out.display());
}
