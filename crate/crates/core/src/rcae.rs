//! Retrospective cost attitude estimator.
//!
//! Each step compares the propagated estimate with a measured orientation,
//! turns the scalar trace error into an adaptive PID signal `u_k`, and
//! applies the correction `eta_k = u_k n_k` along the eigenaxis of the
//! relative orientation before propagating with the measured rate:
//!
//! ```text
//! O_est(k+1) = exp(-(omega_k dt + eta_k)^x) O_est(k)
//! ```
//!
//! No gyro bias state is carried; the adaptive gains absorb it.

use nalgebra::DVector;

use crate::error::EstimatorError;
use crate::rls::{compute_u, RlsConfig, RlsState};
use crate::so3::{attitude_error, axis_angle, exp_so3, relative_orientation, OrientationMatrix, Vec3};

/// Steps between forced re-projections of the estimate onto SO(3).
pub const REPROJECT_EVERY: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct RcaeConfig {
    /// Nominal sample period, seconds.
    pub dt: f64,
    pub rls_config: RlsConfig,
    /// Anti-windup bound on the accumulated error.
    pub gamma_limit: f64,
    pub initial_estimate: OrientationMatrix,
}

impl Default for RcaeConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            rls_config: RlsConfig::pid(),
            gamma_limit: 100.0,
            initial_estimate: OrientationMatrix::identity(),
        }
    }
}

impl RcaeConfig {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        self.rls_config.validate()?;
        if self.rls_config.l_theta != 3 {
            return Err(crate::error::RlsError::Config(format!(
                "the PID regressor needs l_theta = 3, got {}",
                self.rls_config.l_theta
            ))
            .into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(EstimatorError::InvalidMeasurement(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.gamma_limit > 0.0) {
            return Err(crate::error::RlsError::Config("gamma_limit must be positive".into()).into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcaeState {
    pub estimate: OrientationMatrix,
    pub rls: RlsState,
    /// Accumulated error, clamped to `+-gamma_limit`.
    pub gamma: f64,
    pub z_prev: f64,
    pub u_prev: f64,
    pub step_index: u64,
}

impl RcaeState {
    pub fn new(cfg: &RcaeConfig) -> Result<Self, EstimatorError> {
        cfg.validate()?;
        Ok(Self {
            estimate: cfg.initial_estimate,
            rls: RlsState::new(&cfg.rls_config)?,
            gamma: 0.0,
            z_prev: 0.0,
            u_prev: 0.0,
            step_index: 0,
        })
    }
}

/// Per-step signals, indexed as in the update law: `theta` is `theta_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTelemetry {
    pub z: f64,
    pub u: f64,
    pub theta: [f64; 3],
    pub eta: Vec3,
}

/// PID regressor `[z_k, gamma_k, z_k - z_{k-1}]`.
pub fn build_regressor(z: f64, gamma: f64, z_prev: f64) -> DVector<f64> {
    DVector::from_column_slice(&[z, gamma, z - z_prev])
}

/// `eta = u n`, with `n` the eigenaxis of `rel`; zero when `rel` has no
/// defined axis.
pub fn correction_signal(u: f64, rel: &OrientationMatrix) -> Vec3 {
    let aa = axis_angle(rel);
    if aa.is_degenerate() {
        Vec3::zeros()
    } else {
        aa.axis * u
    }
}

/// Uncorrected propagation `exp(-omega dt) O`.
pub fn dead_reckon_step(estimate: &OrientationMatrix, omega: &Vec3, dt: f64) -> OrientationMatrix {
    exp_so3(&(-omega * dt)) * *estimate
}

/// One estimator step with the configured `dt`.
pub fn rcae_step(
    state: &RcaeState,
    omega_m: &Vec3,
    measured: &OrientationMatrix,
    cfg: &RcaeConfig,
) -> Result<(RcaeState, StepTelemetry), EstimatorError> {
    rcae_step_dt(state, omega_m, measured, cfg.dt, cfg)
}

/// One estimator step with an explicit sample period (log replay).
pub fn rcae_step_dt(
    state: &RcaeState,
    omega_m: &Vec3,
    measured: &OrientationMatrix,
    dt: f64,
    cfg: &RcaeConfig,
) -> Result<(RcaeState, StepTelemetry), EstimatorError> {
    let rel = relative_orientation(&state.estimate, measured);
    let z = attitude_error(&state.estimate, measured);
    let gamma = (state.gamma + z).clamp(-cfg.gamma_limit, cfg.gamma_limit);
    let phi = build_regressor(z, gamma, state.z_prev);

    let mut rls = state.rls.update(z, &phi, &cfg.rls_config)?;
    let u = compute_u(&phi, &rls.theta);
    let theta = [rls.theta[0], rls.theta[1], rls.theta[2]];
    rls.push(phi, u);

    let eta = correction_signal(u, &rel);
    let step_index = state.step_index + 1;
    let mut estimate = exp_so3(&-(omega_m * dt + eta)) * state.estimate;
    if step_index.is_multiple_of(REPROJECT_EVERY) || estimate.orthonormality_defect() > 1e-10 {
        estimate = estimate.renormalized();
    }

    Ok((
        RcaeState {
            estimate,
            rls,
            gamma,
            z_prev: z,
            u_prev: u,
            step_index,
        },
        StepTelemetry { z, u, theta, eta },
    ))
}

/// Stateful wrapper around [`rcae_step`].
#[derive(Debug, Clone)]
pub struct Rcae {
    cfg: RcaeConfig,
    state: RcaeState,
}

impl Rcae {
    pub fn new(cfg: RcaeConfig) -> Result<Self, EstimatorError> {
        let state = RcaeState::new(&cfg)?;
        Ok(Self { cfg, state })
    }

    pub fn config(&self) -> &RcaeConfig {
        &self.cfg
    }

    pub fn state(&self) -> &RcaeState {
        &self.state
    }

    pub fn estimate(&self) -> &OrientationMatrix {
        &self.state.estimate
    }

    /// On error the state is left untouched.
    pub fn step(
        &mut self,
        omega_m: &Vec3,
        measured: &OrientationMatrix,
        dt: f64,
    ) -> Result<StepTelemetry, EstimatorError> {
        let (next, telemetry) = rcae_step_dt(&self.state, omega_m, measured, dt, &self.cfg)?;
        self.state = next;
        Ok(telemetry)
    }

    /// Propagation without a measurement; gains and histories are untouched.
    pub fn propagate(&mut self, omega_m: &Vec3, dt: f64) {
        self.state.estimate = dead_reckon_step(&self.state.estimate, omega_m, dt).renormalized();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn regressor_examples() {
        assert_eq!(build_regressor(0.0, 0.0, 0.0), DVector::zeros(3));
        let phi = build_regressor(-0.5, -2.0, -0.4);
        assert_eq!(phi[0], -0.5);
        assert_eq!(phi[1], -2.0);
        assert_relative_eq!(phi[2], -0.1, epsilon = 1e-15);
        // cold start: gamma_0 = z_0, z_{-1} = 0
        let z0 = -0.37;
        assert_eq!(build_regressor(z0, z0, 0.0), DVector::from_column_slice(&[z0, z0, z0]));
    }

    #[test]
    fn correction_examples() {
        assert_eq!(correction_signal(3.0, &OrientationMatrix::identity()), Vec3::zeros());
        let rel = exp_so3(&Vec3::new(0.0, 0.0, 0.2));
        assert_eq!(correction_signal(0.0, &rel), Vec3::zeros());
        assert_relative_eq!(correction_signal(0.1, &rel), Vec3::new(0.0, 0.0, 0.1), epsilon = 1e-15);
    }

    #[test]
    fn dead_reckoning_examples() {
        let o = exp_so3(&Vec3::new(0.2, -0.5, 1.0));
        assert_eq!(dead_reckon_step(&o, &Vec3::zeros(), 0.01), o);
        let w = Vec3::new(0.0, 0.0, 1.3);
        let mut est = o;
        for _ in 0..500 {
            est = dead_reckon_step(&est, &w, 0.01);
        }
        let exact = exp_so3(&(-w * 5.0)) * o;
        assert!((est.matrix() - exact.matrix()).norm() < 1e-12);
    }

    #[test]
    fn dead_reckoning_keeps_initial_error() {
        let truth0 = exp_so3(&Vec3::new(0.5, 0.3, 0.1));
        let mut truth = truth0;
        let mut est = OrientationMatrix::identity();
        let w = Vec3::new(0.4, -0.2, 0.9);
        let z0 = crate::so3::attitude_error(&est, &truth);
        for _ in 0..1000 {
            truth = dead_reckon_step(&truth, &w, 0.01);
            est = dead_reckon_step(&est, &w, 0.01);
            assert_relative_eq!(crate::so3::attitude_error(&est, &truth), z0, epsilon = 1e-10);
        }
    }

    #[test]
    fn first_step_has_zero_signal() {
        let cfg = RcaeConfig::default();
        let state = RcaeState::new(&cfg).unwrap();
        let meas = exp_so3(&Vec3::new(0.3, 0.2, -0.1));
        let (next, tel) = rcae_step(&state, &Vec3::zeros(), &meas, &cfg).unwrap();
        assert!(tel.z < 0.0);
        assert_eq!(tel.u, 0.0);
        assert_eq!(tel.eta, Vec3::zeros());
        assert_eq!(next.gamma, tel.z);
        assert_eq!(next.step_index, 1);
    }

    #[test]
    fn perfect_measurement_and_init_stay_at_zero() {
        let cfg = RcaeConfig {
            initial_estimate: exp_so3(&Vec3::new(0.1, 0.2, 0.3)),
            ..RcaeConfig::default()
        };
        let mut rcae = Rcae::new(cfg.clone()).unwrap();
        let mut truth = cfg.initial_estimate;
        for k in 0..500 {
            let w = Vec3::new((k as f64 * 0.01).cos(), 0.3, -0.2);
            let tel = rcae.step(&w, &truth, 0.01).unwrap();
            assert!(tel.z.abs() < 1e-12);
            assert!(tel.u.abs() < 1e-12);
            truth = dead_reckon_step(&truth, &w, 0.01);
        }
    }

    #[test]
    fn rejects_non_pid_dimension() {
        let mut cfg = RcaeConfig::default();
        cfg.rls_config.l_theta = 2;
        cfg.rls_config.theta0 = DVector::zeros(2);
        assert!(Rcae::new(cfg).is_err());
    }
}
