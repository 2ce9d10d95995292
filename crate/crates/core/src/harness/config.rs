//! Scenario configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! duration = 20
//! dt = 0.01
//! estimators = rcae,mekf,dead_reckon
//! scenario.omega_amplitude_deg = 80, 60, 40
//! rcae.p0_scale = 0.1
//! ```
//!
//! Every key is optional. Angles and rates are degrees in the file and
//! radians in memory. See [`KEYS`] for the full list.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DVector, Matrix6, Vector6};

use crate::error::HarnessError;
use crate::mekf::{mag_reference, MekfConfig};
use crate::rcae::RcaeConfig;
use crate::rls::FirFilter;
use crate::sensors::NoiseModel;
use crate::so3::{euler321_to_matrix, Euler321, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Rcae,
    Mekf,
    DeadReckon,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::Rcae, EstimatorKind::Mekf, EstimatorKind::DeadReckon];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Rcae => "rcae",
            EstimatorKind::Mekf => "mekf",
            EstimatorKind::DeadReckon => "dead_reckon",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "rcae" => Ok(EstimatorKind::Rcae),
            "mekf" => Ok(EstimatorKind::Mekf),
            "dead_reckon" => Ok(EstimatorKind::DeadReckon),
            other => Err(HarnessError::Config(format!("unknown estimator '{other}'"))),
        }
    }
}

/// Parses a comma-separated estimator list, rejecting duplicates.
pub fn parse_estimators(s: &str) -> Result<Vec<EstimatorKind>, HarnessError> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let kind: EstimatorKind = part.parse()?;
        if out.contains(&kind) {
            return Err(HarnessError::Config(format!("estimator '{kind}' listed twice")));
        }
        out.push(kind);
    }
    if out.is_empty() {
        return Err(HarnessError::Config("no estimators selected".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Seconds.
    pub duration: f64,
    /// Seconds.
    pub dt: f64,
    /// Body rate `omega_i(t) = A_i cos(f_i t)`; amplitudes in rad/s.
    pub omega_amplitude: Vec3,
    /// Frequencies in rad/s.
    pub omega_frequency: Vec3,
    pub initial_euler: Euler321,
    pub noise: NoiseModel,
    pub rcae: RcaeConfig,
    pub mekf: MekfConfig,
    pub estimators: Vec<EstimatorKind>,
}

impl Default for ScenarioConfig {
    /// The reference scenario: rates `(80 cos 5t, 60 cos 7t, 40 cos 9t)`
    /// deg/s, initial Euler angles (30, 20, 10) deg, gyro bias (5, 7, 4)
    /// deg/s with 2 deg/s noise, 5 deg Euler-angle measurement noise,
    /// 20 s at 100 Hz.
    fn default() -> Self {
        Self {
            duration: 20.0,
            dt: 0.01,
            omega_amplitude: Vec3::new(80.0, 60.0, 40.0).map(f64::to_radians),
            omega_frequency: Vec3::new(5.0, 7.0, 9.0),
            initial_euler: Euler321::from_degrees(30.0, 20.0, 10.0),
            noise: NoiseModel::reference(),
            rcae: RcaeConfig::default(),
            mekf: MekfConfig::default(),
            estimators: EstimatorKind::ALL.to_vec(),
        }
    }
}

/// Every recognized configuration key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("duration", "run length, s"),
    ("dt", "sample period, s"),
    ("estimators", "comma-separated subset of rcae,mekf,dead_reckon"),
    ("scenario.omega_amplitude_deg", "rate amplitudes A1,A2,A3, deg/s"),
    ("scenario.omega_frequency", "rate frequencies f1,f2,f3, rad/s"),
    ("scenario.initial_euler_deg", "initial yaw,pitch,roll, deg"),
    ("noise.gyro_bias_deg", "constant gyro bias, deg/s"),
    ("noise.gyro_sigma_deg", "gyro white-noise sigma, deg/s"),
    ("noise.euler_sigma_deg", "Euler-angle noise sigma, deg (one value or yaw,pitch,roll)"),
    ("noise.seed", "64-bit generator seed"),
    ("rcae.p0_scale", "initial gain covariance P0 = s I"),
    ("rcae.theta0", "initial gains Kp,Ki,Kd"),
    ("rcae.rz", "performance weight"),
    ("rcae.ru", "control weight"),
    ("rcae.lambda", "forgetting factor in (0, 1]"),
    ("rcae.filter", "FIR coefficients N1,...,Nnf"),
    ("rcae.gamma_limit", "accumulated-error clamp"),
    ("rcae.initial_euler_deg", "initial estimate yaw,pitch,roll, deg"),
    ("mekf.p0", "initial covariance scale"),
    ("mekf.q_attitude", "attitude process noise"),
    ("mekf.q_bias", "bias process noise"),
    ("mekf.r_gravity", "gravity residual variance"),
    ("mekf.r_mag", "magnetic residual variance"),
    ("mekf.mag_dip_deg", "reference field dip angle, deg"),
];

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, HarnessError> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| HarnessError::Config(format!("{key}: cannot parse '{}' as a number", s.trim())))
        })
        .collect()
}

fn parse_scalar(key: &str, value: &str) -> Result<f64, HarnessError> {
    match parse_list(key, value)?.as_slice() {
        [x] => Ok(*x),
        other => Err(HarnessError::Config(format!("{key}: expected one value, got {}", other.len()))),
    }
}

fn parse_vec3(key: &str, value: &str) -> Result<Vec3, HarnessError> {
    match parse_list(key, value)?.as_slice() {
        [a, b, c] => Ok(Vec3::new(*a, *b, *c)),
        other => Err(HarnessError::Config(format!("{key}: expected three values, got {}", other.len()))),
    }
}

fn deg3(key: &str, value: &str) -> Result<Vec3, HarnessError> {
    Ok(parse_vec3(key, value)?.map(f64::to_radians))
}

fn block_diag(a: f64, b: f64) -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::new(a, a, a, b, b, b))
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a configuration file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HarnessError::Config(format!("line {}: expected 'key = value'", lineno + 1)));
            };
            cfg.set(key.trim(), value.trim())
                .map_err(|e| HarnessError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        self.apply(key, value).map_err(|e| match e {
            HarnessError::Config(s) => s,
            other => other.to_string(),
        })
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "duration" => self.duration = parse_scalar(key, value)?,
            "dt" => {
                self.dt = parse_scalar(key, value)?;
                self.rcae.dt = self.dt;
                self.mekf.dt = self.dt;
            }
            "estimators" => self.estimators = parse_estimators(value)?,
            "scenario.omega_amplitude_deg" => self.omega_amplitude = deg3(key, value)?,
            "scenario.omega_frequency" => self.omega_frequency = parse_vec3(key, value)?,
            "scenario.initial_euler_deg" => {
                let v = parse_vec3(key, value)?;
                self.initial_euler = Euler321::from_degrees(v.x, v.y, v.z);
            }
            "noise.gyro_bias_deg" => self.noise.gyro_bias = deg3(key, value)?,
            "noise.gyro_sigma_deg" => self.noise.gyro_sigma = parse_scalar(key, value)?.to_radians(),
            "noise.euler_sigma_deg" => {
                let v = parse_list(key, value)?;
                self.noise.euler_sigma = match v.as_slice() {
                    [s] => Vec3::repeat(s.to_radians()),
                    [a, b, c] => Vec3::new(*a, *b, *c).map(f64::to_radians),
                    _ => return Err(HarnessError::Config(format!("{key}: expected one or three values"))),
                };
            }
            "noise.seed" => {
                self.noise.seed = value
                    .parse()
                    .map_err(|_| HarnessError::Config(format!("{key}: '{value}' is not an unsigned integer")))?
            }
            "rcae.p0_scale" => self.rcae.rls_config.p0_scale = parse_scalar(key, value)?,
            "rcae.theta0" => self.rcae.rls_config.theta0 = DVector::from_vec(parse_list(key, value)?),
            "rcae.rz" => self.rcae.rls_config.rz = parse_scalar(key, value)?,
            "rcae.ru" => self.rcae.rls_config.ru = parse_scalar(key, value)?,
            "rcae.lambda" => self.rcae.rls_config.lambda = parse_scalar(key, value)?,
            "rcae.filter" => {
                self.rcae.rls_config.filter = FirFilter::new(parse_list(key, value)?)
                    .map_err(|e| HarnessError::Config(format!("{key}: {e}")))?
            }
            "rcae.gamma_limit" => self.rcae.gamma_limit = parse_scalar(key, value)?,
            "rcae.initial_euler_deg" => {
                let v = parse_vec3(key, value)?;
                self.rcae.initial_estimate = euler321_to_matrix(&Euler321::from_degrees(v.x, v.y, v.z));
            }
            "mekf.p0" => self.mekf.initial_covariance = Matrix6::identity() * parse_scalar(key, value)?,
            "mekf.q_attitude" | "mekf.q_bias" => {
                let x = parse_scalar(key, value)?;
                let (qa, qb) = (self.mekf.q[(0, 0)], self.mekf.q[(3, 3)]);
                self.mekf.q = if key == "mekf.q_attitude" { block_diag(x, qb) } else { block_diag(qa, x) };
            }
            "mekf.r_gravity" | "mekf.r_mag" => {
                let x = parse_scalar(key, value)?;
                let (rg, rm) = (self.mekf.r[(0, 0)], self.mekf.r[(3, 3)]);
                self.mekf.r = if key == "mekf.r_gravity" { block_diag(x, rm) } else { block_diag(rg, x) };
            }
            "mekf.mag_dip_deg" => self.mekf.ref_mag = mag_reference(parse_scalar(key, value)?.to_radians()),
            other => return Err(HarnessError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Number of samples, `floor(duration / dt)`.
    pub fn step_count(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |s: String| Err(HarnessError::Config(s));
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.duration / self.dt > 1e8 {
            return bad("duration/dt exceeds 1e8 steps".into());
        }
        if self.step_count() == 0 {
            return bad("duration is shorter than one sample".into());
        }
        if self.estimators.is_empty() {
            return bad("no estimators selected".into());
        }
        if !self.omega_amplitude.iter().chain(self.omega_frequency.iter()).all(|x| x.is_finite()) {
            return bad("angular-rate profile must be finite".into());
        }
        self.noise.validate().map_err(HarnessError::Config)?;
        self.rcae
            .validate()
            .map_err(|e| HarnessError::Config(format!("rcae: {e}")))?;
        self.mekf.validate().map_err(|e| HarnessError::Config(format!("mekf: {e}")))?;
        Ok(())
    }

    pub fn has(&self, kind: EstimatorKind) -> bool {
        self.estimators.contains(&kind)
    }
}
