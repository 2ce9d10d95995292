//! Measurement models: orientation from accelerometer and magnetometer
//! directions, and the gyro and Euler-angle noise used by the simulation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::error::SensorError;
use crate::so3::{
    euler321_to_matrix, matrix_to_euler321, Euler321, Mat3, OrientationMatrix, UnitQuaternion, Vec3,
};

const MIN_NORM: f64 = 1e-6;
const PARALLEL_TOL: f64 = 1e-6;

/// Orientation `O_{B/A}` from body-frame gravity and magnetic field
/// directions, with `k_A` along gravity and the field in the `i_A`-`k_A`
/// plane. Only the directions of `a` and `m` matter.
pub fn orientation_from_accel_mag(a: &Vec3, m: &Vec3) -> Result<OrientationMatrix, SensorError> {
    let (na, nm) = (a.norm(), m.norm());
    if !(na.is_finite() && nm.is_finite()) {
        return Err(SensorError::DegenerateGeometry("non-finite input".into()));
    }
    if na <= MIN_NORM || nm <= MIN_NORM {
        return Err(SensorError::DegenerateGeometry(format!(
            "vector norm too small (|a| = {na:e}, |m| = {nm:e})"
        )));
    }
    let k = a / na;
    let m_unit = m / nm;
    let cos = k.dot(&m_unit);
    if cos.abs() >= 1.0 - PARALLEL_TOL {
        return Err(SensorError::DegenerateGeometry(format!(
            "field parallel to gravity (cos = {cos})"
        )));
    }
    // k x m is only unit length when m is horizontal
    let j = k.cross(&m_unit).normalize();
    let i = j.cross(&k);
    Ok(OrientationMatrix::new(Mat3::from_columns(&[i, j, k]))?)
}

/// Gyro bias and white noise, plus Euler-angle noise on orientation
/// measurements. Angles and rates are radians.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub gyro_bias: Vec3,
    pub gyro_sigma: f64,
    /// Standard deviations for (yaw, pitch, roll).
    pub euler_sigma: Vec3,
    pub seed: u64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            gyro_bias: Vec3::zeros(),
            gyro_sigma: 0.0,
            euler_sigma: Vec3::zeros(),
            seed: 0,
        }
    }

    /// `b = (5, 7, 4)` deg/s, `sigma_w = 2` deg/s, `sigma_v = 5` deg.
    pub fn reference() -> Self {
        Self {
            gyro_bias: Vec3::new(5.0, 7.0, 4.0).map(f64::to_radians),
            gyro_sigma: 2f64.to_radians(),
            euler_sigma: Vec3::repeat(5f64.to_radians()),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.gyro_sigma >= 0.0) || !self.euler_sigma.iter().all(|s| *s >= 0.0) {
            return Err("noise standard deviations must be non-negative".into());
        }
        if !self.gyro_bias.iter().all(|b| b.is_finite()) {
            return Err("gyro bias must be finite".into());
        }
        Ok(())
    }
}

/// Independent generators per sensor channel. Both are ChaCha8 seeded with
/// the model seed; the gyro channel uses stream 1 and the orientation
/// channel stream 2.
#[derive(Debug, Clone)]
pub struct NoiseStreams {
    pub gyro: ChaCha8Rng,
    pub orientation: ChaCha8Rng,
}

impl NoiseStreams {
    pub const GYRO_STREAM: u64 = 1;
    pub const ORIENTATION_STREAM: u64 = 2;

    pub fn new(seed: u64) -> Self {
        let mut gyro = ChaCha8Rng::seed_from_u64(seed);
        gyro.set_stream(Self::GYRO_STREAM);
        let mut orientation = ChaCha8Rng::seed_from_u64(seed);
        orientation.set_stream(Self::ORIENTATION_STREAM);
        Self { gyro, orientation }
    }
}

fn normal3<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// `omega + b + w`, `w ~ N(0, sigma_w^2 I)`.
pub fn noisy_gyro<R: Rng + ?Sized>(omega: &Vec3, model: &NoiseModel, rng: &mut R) -> Vec3 {
    let w = normal3(rng);
    omega + model.gyro_bias + w * model.gyro_sigma
}

/// Perturbs the 3-2-1 Euler angles of `truth` and reassembles the matrix.
pub fn noisy_orientation<R: Rng + ?Sized>(
    truth: &OrientationMatrix,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<OrientationMatrix, SensorError> {
    let e = matrix_to_euler321(truth).strict()?;
    let v = normal3(rng).component_mul(&model.euler_sigma);
    let perturbed = Euler321::new(e.yaw + v.x, e.pitch + v.y, e.roll + v.z).wrapped();
    Ok(euler321_to_matrix(&perturbed))
}

/// One logged IMU sample in file units. Accel and mag may use any
/// consistent units since only directions are used.
#[derive(Debug, Clone, PartialEq)]
pub struct ImuRecord {
    pub t: f64,
    /// Deg/s.
    pub gyro_deg: Vec3,
    pub accel: Vec3,
    pub mag: Vec3,
    pub truth_quat: Option<UnitQuaternion>,
}
