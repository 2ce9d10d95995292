use std::time::Duration;

use crate::harness::{EstimatorKind, RunRow};
use crate::so3::{wrap_angle, Euler321};

/// Absolute per-angle differences `(e_psi, e_theta, e_phi)`, each wrapped
/// into `[0, pi]`.
pub fn euler_errors(truth: &Euler321, estimate: &Euler321) -> [f64; 3] {
    [
        wrap_angle(estimate.yaw - truth.yaw).abs(),
        wrap_angle(estimate.pitch - truth.pitch).abs(),
        wrap_angle(estimate.roll - truth.roll).abs(),
    ]
}

/// Fraction of the run treated as steady state.
pub const STEADY_STATE_FRACTION: f64 = 0.25;

/// First row of the final quarter.
pub fn steady_state_start(rows: usize) -> usize {
    ((rows as f64) * (1.0 - STEADY_STATE_FRACTION)).floor() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary {
    pub kind: EstimatorKind,
    /// Mean `|z|` over the final quarter.
    pub mean_abs_z: f64,
    /// RMS `(e_psi, e_theta, e_phi)` over the final quarter, degrees.
    pub rms_euler_errors_deg: Option<[f64; 3]>,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub estimators: Vec<EstimatorSummary>,
    /// RMS Euler errors of the raw measurements over the final quarter,
    /// degrees.
    pub measurement_rms_euler_errors_deg: Option<[f64; 3]>,
    pub wall_clock: Duration,
}

fn rms3(samples: impl Iterator<Item = [f64; 3]>) -> Option<[f64; 3]> {
    let mut acc = [0.0; 3];
    let mut n = 0usize;
    for s in samples {
        for i in 0..3 {
            acc[i] += s[i] * s[i];
        }
        n += 1;
    }
    (n > 0).then(|| acc.map(|a| (a / n as f64).sqrt().to_degrees()))
}

impl RunSummary {
    pub fn from_rows(kinds: &[EstimatorKind], rows: &[RunRow]) -> Self {
        let tail = &rows[steady_state_start(rows.len())..];
        let estimators = kinds
            .iter()
            .enumerate()
            .map(|(i, kind)| {
                let zs: Vec<f64> = tail
                    .iter()
                    .map(|r| r.estimates[i].z)
                    .filter(|z| z.is_finite())
                    .collect();
                let mean_abs_z = if zs.is_empty() {
                    f64::NAN
                } else {
                    zs.iter().map(|z| z.abs()).sum::<f64>() / zs.len() as f64
                };
                EstimatorSummary {
                    kind: *kind,
                    mean_abs_z,
                    rms_euler_errors_deg: rms3(tail.iter().filter_map(|r| r.estimates[i].euler_errors)),
                    failed: false,
                }
            })
            .collect();
        let measurement = rms3(tail.iter().filter_map(|r| match (r.truth, r.measured) {
            (Some(t), Some(m)) => Some(euler_errors(&t, &m)),
            _ => None,
        }));
        Self {
            estimators,
            measurement_rms_euler_errors_deg: measurement,
            wall_clock: Duration::ZERO,
        }
    }

    pub fn get(&self, kind: EstimatorKind) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|s| s.kind == kind)
    }
}
