//! Experiment orchestration: synthetic scenarios, log replay, metrics and
//! CSV output.
//!
//! Both [`run_scenario`] and [`replay_log`] reduce their input to a sequence
//! of [`StepInput`]s and hand it to [`run_estimators`], so a simulated run
//! exported as a log and replayed goes through the same code path.

pub mod config;
pub mod metrics;
pub mod output;
pub mod replay;
pub mod scenario;

use std::time::Instant;

use crate::error::HarnessError;
use crate::mekf::Mekf;
use crate::rcae::{dead_reckon_step, Rcae};
use crate::so3::{attitude_error, matrix_to_euler321, Euler321, OrientationMatrix, Vec3};

pub use config::{EstimatorKind, ScenarioConfig};
pub use metrics::{euler_errors, EstimatorSummary, RunSummary};
pub use output::{write_log_csv, write_run_csv, write_summary_table};
pub use replay::{read_log_csv, replay_log};
pub use scenario::{
    export_log, generate_truth, run_scenario, run_simulated, simulate_measurements, SimulatedSample, TruthSample,
};

/// Everything one estimator step consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInput {
    pub t: f64,
    /// Propagation interval to the next sample.
    pub dt: f64,
    /// Measured body rate, rad/s.
    pub gyro: Vec3,
    /// `None` when no usable orientation measurement exists for this sample.
    pub measured: Option<OrientationMatrix>,
    pub truth: Option<OrientationMatrix>,
}

/// One estimator's output at a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSample {
    pub euler: Euler321,
    /// Attitude error against truth, or against the measurement when no
    /// truth exists; NaN when neither does.
    pub z: f64,
    /// Absolute Euler errors against truth, radians.
    pub euler_errors: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcaeSample {
    /// Error against the measurement used by the update; NaN on held steps.
    pub z: f64,
    pub u: f64,
    /// `[Kp, Ki, Kd]` after the update.
    pub theta: [f64; 3],
    pub eta: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MekfSample {
    /// Rad/s.
    pub bias: Vec3,
    pub quat_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub t: f64,
    pub truth: Option<Euler321>,
    pub measured: Option<Euler321>,
    /// Same order as [`RunResult::estimators`].
    pub estimates: Vec<EstimatorSample>,
    pub rcae: Option<RcaeSample>,
    pub mekf: Option<MekfSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorFailure {
    pub estimator: EstimatorKind,
    pub row: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub estimators: Vec<EstimatorKind>,
    pub rows: Vec<RunRow>,
    pub summary: RunSummary,
    /// First failure of each estimator; a failed estimator is frozen.
    pub failures: Vec<EstimatorFailure>,
    /// Non-fatal data issues (held measurements, time gaps).
    pub warnings: Vec<String>,
}

impl RunResult {
    pub fn column(&self, kind: EstimatorKind) -> Option<usize> {
        self.estimators.iter().position(|k| *k == kind)
    }

    pub fn all_failed(&self) -> bool {
        self.estimators
            .iter()
            .all(|k| self.failures.iter().any(|f| f.estimator == *k))
    }
}

enum Engine {
    Rcae(Box<Rcae>),
    Mekf(Box<Mekf>),
    DeadReckon(OrientationMatrix),
}

struct Slot {
    kind: EstimatorKind,
    engine: Engine,
    failed: bool,
}

impl Slot {
    fn estimate(&self) -> OrientationMatrix {
        match &self.engine {
            Engine::Rcae(r) => *r.estimate(),
            Engine::Mekf(m) => m.state().orientation(),
            Engine::DeadReckon(o) => *o,
        }
    }
}

fn euler_of(o: &OrientationMatrix) -> Euler321 {
    matrix_to_euler321(o).angles
}

/// Steps every configured estimator through `inputs`.
///
/// At each sample the reported estimate is the one paired with that
/// sample's measurement: the RCAE and dead-reckoning estimates before
/// propagation, the MEKF estimate after its measurement update. An
/// estimator whose step fails is frozen at its last estimate and the run
/// continues with the others.
pub fn run_estimators(inputs: &[StepInput], cfg: &ScenarioConfig) -> Result<RunResult, HarnessError> {
    let started = Instant::now();
    let mut slots = Vec::with_capacity(cfg.estimators.len());
    for kind in &cfg.estimators {
        let engine = match kind {
            EstimatorKind::Rcae => Engine::Rcae(Box::new(
                Rcae::new(cfg.rcae.clone()).map_err(|e| HarnessError::Config(format!("rcae: {e}")))?,
            )),
            EstimatorKind::Mekf => Engine::Mekf(Box::new(
                Mekf::new(cfg.mekf.clone()).map_err(|e| HarnessError::Config(format!("mekf: {e}")))?,
            )),
            EstimatorKind::DeadReckon => Engine::DeadReckon(cfg.rcae.initial_estimate),
        };
        slots.push(Slot {
            kind: *kind,
            engine,
            failed: false,
        });
    }

    let mut rows = Vec::with_capacity(inputs.len());
    let mut failures = Vec::new();
    for (row_index, input) in inputs.iter().enumerate() {
        let mut rcae_sample = None;
        let mut mekf_sample = None;
        let mut estimates = Vec::with_capacity(slots.len());

        for slot in slots.iter_mut() {
            let mut failure = None;
            let reported = if slot.failed {
                slot.estimate()
            } else {
                match &mut slot.engine {
                    Engine::Rcae(rcae) => {
                        let before = *rcae.estimate();
                        match input.measured {
                            Some(meas) => match rcae.step(&input.gyro, &meas, input.dt) {
                                Ok(tel) => {
                                    rcae_sample = Some(RcaeSample {
                                        z: tel.z,
                                        u: tel.u,
                                        theta: tel.theta,
                                        eta: tel.eta,
                                    })
                                }
                                Err(e) => failure = Some(e.to_string()),
                            },
                            None => {
                                let theta = &rcae.state().rls.theta;
                                rcae_sample = Some(RcaeSample {
                                    z: f64::NAN,
                                    u: 0.0,
                                    theta: [theta[0], theta[1], theta[2]],
                                    eta: Vec3::zeros(),
                                });
                                rcae.propagate(&input.gyro, input.dt);
                            }
                        }
                        before
                    }
                    Engine::Mekf(mekf) => {
                        if let Some(meas) = input.measured {
                            if let Err(e) = mekf.update_orientation(&meas) {
                                failure = Some(e.to_string());
                            }
                        }
                        let reported = mekf.state().orientation();
                        if failure.is_none() {
                            mekf_sample = Some(MekfSample {
                                bias: mekf.state().bias,
                                quat_norm: mekf.state().q.norm(),
                            });
                            mekf.predict(&input.gyro, input.dt);
                        }
                        reported
                    }
                    Engine::DeadReckon(o) => {
                        let before = *o;
                        *o = dead_reckon_step(o, &input.gyro, input.dt).renormalized();
                        before
                    }
                }
            };
            if let Some(message) = failure {
                slot.failed = true;
                failures.push(EstimatorFailure {
                    estimator: slot.kind,
                    row: row_index,
                    message,
                });
            }

            let reference = input.truth.or(input.measured);
            let z = reference.map_or(f64::NAN, |r| attitude_error(&r, &reported));
            let euler = euler_of(&reported);
            let errors = input.truth.map(|t| euler_errors(&euler_of(&t), &euler));
            estimates.push(EstimatorSample {
                euler,
                z,
                euler_errors: errors,
            });
        }

        rows.push(RunRow {
            t: input.t,
            truth: input.truth.as_ref().map(euler_of),
            measured: input.measured.as_ref().map(euler_of),
            estimates,
            rcae: rcae_sample,
            mekf: mekf_sample,
        });
    }

    let mut summary = RunSummary::from_rows(&cfg.estimators, &rows);
    summary.wall_clock = started.elapsed();
    for f in &failures {
        if let Some(s) = summary.estimators.iter_mut().find(|s| s.kind == f.estimator) {
            s.failed = true;
        }
    }
    Ok(RunResult {
        estimators: cfg.estimators.clone(),
        rows,
        summary,
        failures,
        warnings: Vec::new(),
    })
}

/// Propagation interval for each sample: the forward difference of the
/// time stamps, with the last sample reusing the previous interval.
pub fn step_intervals(times: &[f64], fallback: f64) -> Vec<f64> {
    let n = times.len();
    (0..n)
        .map(|k| {
            if k + 1 < n {
                times[k + 1] - times[k]
            } else if n >= 2 {
                times[n - 1] - times[n - 2]
            } else {
                fallback
            }
        })
        .collect()
}
