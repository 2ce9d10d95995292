//! Multiplicative extended Kalman filter baseline.
//!
//! State is a unit quaternion plus a gyro-bias estimate, with a 6x6
//! covariance over `[delta_a; delta_b]`. The attitude error multiplies on
//! the left: `O_true = exp(-delta_a^x) O_est`, the same side on which the
//! propagation `exp(-omega^x dt)` acts. The bias error is
//! `delta_b = b_true - b_est`.

use nalgebra::{Matrix3, Matrix6, Vector6};

use crate::error::EstimatorError;
use crate::so3::{cross_matrix, exp_so3, quat_to_matrix, OrientationMatrix, UnitQuaternion, Vec3};

const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct MekfConfig {
    pub dt: f64,
    /// Continuous process covariance; discretized as `Q dt`.
    pub q: Matrix6<f64>,
    /// Measurement covariance over `[gravity; magnetic]` residuals.
    pub r: Matrix6<f64>,
    /// A-frame unit gravity direction.
    pub ref_gravity: Vec3,
    /// A-frame unit field direction.
    pub ref_mag: Vec3,
    pub initial_covariance: Matrix6<f64>,
}

fn block_diag(a: f64, b: f64) -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::new(a, a, a, b, b, b))
}

/// `(cos dip, 0, sin dip)`.
pub fn mag_reference(dip: f64) -> Vec3 {
    Vec3::new(dip.cos(), 0.0, dip.sin())
}

impl Default for MekfConfig {
    /// `P(0) = 1e4 I`, `Q = diag(1e-4 I, I)`, `R = diag(0.01 I, 100 I)`,
    /// gravity along `k_A` and a 60 degree field dip.
    fn default() -> Self {
        Self {
            dt: 0.01,
            q: block_diag(1e-4, 1.0),
            r: block_diag(0.01, 100.0),
            ref_gravity: Vec3::z(),
            ref_mag: mag_reference(60f64.to_radians()),
            initial_covariance: Matrix6::identity() * 1e4,
        }
    }
}

impl MekfConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0) {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        for (name, v) in [("ref_gravity", &self.ref_gravity), ("ref_mag", &self.ref_mag)] {
            if (v.norm() - 1.0).abs() > 1e-9 {
                return Err(format!("{name} must be a unit vector"));
            }
        }
        if self.ref_gravity.cross(&self.ref_mag).norm() < 1e-6 {
            return Err("reference vectors must not be parallel".into());
        }
        for (name, m) in [("Q", &self.q), ("R", &self.r), ("P0", &self.initial_covariance)] {
            if (m - m.transpose()).norm() > 1e-12 || m.symmetric_eigenvalues().min() < 0.0 {
                return Err(format!("{name} must be symmetric positive semidefinite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MekfState {
    pub q: UnitQuaternion,
    /// Gyro-bias estimate, rad/s.
    pub bias: Vec3,
    pub p: Matrix6<f64>,
}

impl MekfState {
    /// Identity attitude and zero bias.
    pub fn new(cfg: &MekfConfig) -> Self {
        Self {
            q: UnitQuaternion::identity(),
            bias: Vec3::zeros(),
            p: cfg.initial_covariance,
        }
    }

    pub fn orientation(&self) -> OrientationMatrix {
        quat_to_matrix(&self.q)
    }
}

fn symmetrize(p: Matrix6<f64>) -> Matrix6<f64> {
    (p + p.transpose()) * 0.5
}

pub fn mekf_predict(state: &MekfState, omega_m: &Vec3, cfg: &MekfConfig) -> MekfState {
    mekf_predict_dt(state, omega_m, cfg.dt, cfg)
}

/// Propagation with the bias-corrected rate over an explicit `dt`.
pub fn mekf_predict_dt(state: &MekfState, omega_m: &Vec3, dt: f64, cfg: &MekfConfig) -> MekfState {
    let rate = omega_m - state.bias;
    let increment = UnitQuaternion::from_rotation_vector(&(-rate * dt));
    let q = increment.compose(&state.q).normalized();

    let mut f = Matrix6::identity();
    f.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(exp_so3(&(-rate * dt)).matrix());
    f.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&(Matrix3::identity() * -dt));
    let p = symmetrize(f * state.p * f.transpose() + cfg.q * dt);

    MekfState {
        q,
        bias: state.bias,
        p,
    }
}

/// Joint gravity and magnetic-field update. `a_meas` and `m_meas` are
/// body-frame vectors; only their directions are used.
pub fn mekf_update(
    state: &MekfState,
    a_meas: &Vec3,
    m_meas: &Vec3,
    cfg: &MekfConfig,
) -> Result<MekfState, EstimatorError> {
    let (na, nm) = (a_meas.norm(), m_meas.norm());
    if !(na > 1e-6 && nm > 1e-6 && na.is_finite() && nm.is_finite()) {
        return Err(EstimatorError::InvalidMeasurement(format!(
            "vector measurement norms |a| = {na:e}, |m| = {nm:e}"
        )));
    }
    let o = quat_to_matrix(&state.q);
    let g_pred = o * cfg.ref_gravity;
    let m_pred = o * cfg.ref_mag;

    // y = (I - delta_a^x) O v  =>  y - O v = (O v)^x delta_a
    let mut h = Matrix6::zeros();
    h.fixed_view_mut::<3, 3>(0, 0).copy_from(&cross_matrix(&g_pred));
    h.fixed_view_mut::<3, 3>(3, 0).copy_from(&cross_matrix(&m_pred));
    let mut residual = Vector6::zeros();
    residual.fixed_rows_mut::<3>(0).copy_from(&(a_meas / na - g_pred));
    residual.fixed_rows_mut::<3>(3).copy_from(&(m_meas / nm - m_pred));

    let s = symmetrize(h * state.p * h.transpose() + cfg.r);
    let s_inv = s.try_inverse().ok_or(EstimatorError::SingularInnovation {
        condition: f64::INFINITY,
    })?;
    let condition = s.norm() * s_inv.norm();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(EstimatorError::SingularInnovation { condition });
    }
    let k = state.p * h.transpose() * s_inv;
    let delta = k * residual;
    let delta_a: Vec3 = delta.fixed_rows::<3>(0).into();
    let delta_b: Vec3 = delta.fixed_rows::<3>(3).into();

    let q = UnitQuaternion::from_rotation_vector(&-delta_a)
        .compose(&state.q)
        .normalized();
    let i_kh = Matrix6::identity() - k * h;
    let p = symmetrize(i_kh * state.p * i_kh.transpose() + k * cfg.r * k.transpose());

    Ok(MekfState {
        q,
        bias: state.bias + delta_b,
        p,
    })
}

/// Synthetic body-frame gravity and field directions consistent with a
/// measured orientation.
pub fn mekf_measurements_from_orientation(measured: &OrientationMatrix, cfg: &MekfConfig) -> (Vec3, Vec3) {
    (*measured * cfg.ref_gravity, *measured * cfg.ref_mag)
}

/// Stateful wrapper: update with the current measurement, then predict.
#[derive(Debug, Clone)]
pub struct Mekf {
    cfg: MekfConfig,
    state: MekfState,
}

impl Mekf {
    pub fn new(cfg: MekfConfig) -> Result<Self, EstimatorError> {
        cfg.validate().map_err(EstimatorError::InvalidMeasurement)?;
        let state = MekfState::new(&cfg);
        Ok(Self { cfg, state })
    }

    pub fn config(&self) -> &MekfConfig {
        &self.cfg
    }

    pub fn state(&self) -> &MekfState {
        &self.state
    }

    pub fn update_orientation(&mut self, measured: &OrientationMatrix) -> Result<(), EstimatorError> {
        let (a, m) = mekf_measurements_from_orientation(measured, &self.cfg);
        self.state = mekf_update(&self.state, &a, &m, &self.cfg)?;
        Ok(())
    }

    pub fn predict(&mut self, omega_m: &Vec3, dt: f64) {
        self.state = mekf_predict_dt(&self.state, omega_m, dt, &self.cfg);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::{axis_angle, matrix_to_quat};
    use crate::sensors::orientation_from_accel_mag;

    fn min_eig(p: &Matrix6<f64>) -> f64 {
        p.symmetric_eigenvalues().min()
    }

    #[test]
    fn zero_net_rate_only_grows_covariance() {
        let cfg = MekfConfig::default();
        let mut s = MekfState::new(&cfg);
        s.bias = Vec3::new(0.01, -0.02, 0.03);
        s.q = matrix_to_quat(&exp_so3(&Vec3::new(0.2, 0.1, -0.4)));
        let next = mekf_predict(&s, &s.bias.clone(), &cfg);
        assert!((next.q.eta - s.q.eta).abs() < 1e-15);
        assert!((next.q.eps - s.q.eps).norm() < 1e-15);
        let mut f = Matrix6::identity();
        f.fixed_view_mut::<3, 3>(0, 3).copy_from(&(Matrix3::identity() * -cfg.dt));
        let expected = f * s.p * f.transpose() + cfg.q * cfg.dt;
        assert!((next.p - expected).norm() < 1e-9);
    }

    #[test]
    fn constant_rate_propagation_is_exact() {
        let cfg = MekfConfig::default();
        let mut s = MekfState::new(&cfg);
        let initial = exp_so3(&Vec3::new(0.3, -0.2, 0.1));
        s.q = matrix_to_quat(&initial);
        let w = Vec3::new(0.0, 0.0, 0.8);
        for _ in 0..1000 {
            s = mekf_predict(&s, &w, &cfg);
        }
        let expected = exp_so3(&(-w * 10.0)) * initial;
        assert!((s.orientation().matrix() - expected.matrix()).norm() < 1e-12);
    }

    #[test]
    fn consistent_measurement_leaves_state() {
        let cfg = MekfConfig::default();
        let mut s = MekfState::new(&cfg);
        let o = exp_so3(&Vec3::new(-0.5, 0.4, 1.2));
        s.q = matrix_to_quat(&o);
        s.bias = Vec3::new(0.1, 0.0, -0.1);
        let (a, m) = mekf_measurements_from_orientation(&o, &cfg);
        let next = mekf_update(&s, &a, &m, &cfg).unwrap();
        assert!((next.orientation().matrix() - o.matrix()).norm() < 1e-12);
        assert!((next.bias - s.bias).norm() < 1e-12);
        assert!(next.p.trace() <= s.p.trace());
    }

    #[test]
    fn bridge_examples() {
        let cfg = MekfConfig::default();
        let (a, m) = mekf_measurements_from_orientation(&OrientationMatrix::identity(), &cfg);
        assert_eq!(a, cfg.ref_gravity);
        assert_eq!(m, cfg.ref_mag);
        let o = exp_so3(&Vec3::new(1.0, -2.0, 0.5));
        let (a, m) = mekf_measurements_from_orientation(&o, &cfg);
        let back = orientation_from_accel_mag(&a, &m).unwrap();
        assert!((back.matrix() - o.matrix()).norm() < 1e-9);
    }

    #[test]
    fn invalid_measurement_is_rejected() {
        let cfg = MekfConfig::default();
        let s = MekfState::new(&cfg);
        assert!(mekf_update(&s, &Vec3::zeros(), &Vec3::x(), &cfg).is_err());
    }

    #[test]
    fn noiseless_measurements_converge() {
        let cfg = MekfConfig::default();
        let mut s = MekfState::new(&cfg);
        let mut truth = exp_so3(&Vec3::new(0.4, 0.3, -0.2));
        let initial = axis_angle(&(s.orientation() * truth.transpose())).angle;
        let (a, m) = mekf_measurements_from_orientation(&truth, &cfg);
        let first = mekf_update(&s, &a, &m, &cfg).unwrap();
        assert!(axis_angle(&(first.orientation() * truth.transpose())).angle < initial);

        let mut err = initial;
        for k in 0..3000 {
            let t = k as f64 * cfg.dt;
            let w = Vec3::new((5.0 * t).cos(), 0.7 * (7.0 * t).cos(), 0.5 * (9.0 * t).cos());
            let (a, m) = mekf_measurements_from_orientation(&truth, &cfg);
            s = mekf_update(&s, &a, &m, &cfg).unwrap();
            assert!((s.q.norm() - 1.0).abs() < 1e-9);
            s = mekf_predict(&s, &w, &cfg);
            truth = crate::rcae::dead_reckon_step(&truth, &w, cfg.dt);
            err = axis_angle(&(s.orientation() * truth.transpose())).angle;
        }
        assert!(err < 1e-6, "final error {err}");
        assert!(s.bias.norm() < 1e-4, "bias {:?}", s.bias);
    }

    #[test]
    fn covariance_stays_psd_under_random_rates() {
        use rand::{Rng, SeedableRng};
        let cfg = MekfConfig::default();
        let mut s = MekfState::new(&cfg);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for k in 0..100_000 {
            let w = Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            s = mekf_predict(&s, &w, &cfg);
            if k % 50 == 0 {
                let o = exp_so3(&Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), 0.2));
                let (a, m) = mekf_measurements_from_orientation(&o, &cfg);
                s = mekf_update(&s, &a, &m, &cfg).unwrap();
            }
            if k % 1000 == 0 {
                assert!((s.p - s.p.transpose()).norm() < 1e-9);
                assert!(min_eig(&s.p) >= -1e-12);
            }
        }
        assert!((s.q.norm() - 1.0).abs() < 1e-9);
    }
}
