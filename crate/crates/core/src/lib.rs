//! # rcae
//!
//! Attitude estimation on SO(3) with a retrospective cost adaptive
//! correction, alongside a multiplicative EKF and plain dead reckoning for
//! comparison.
//!
//! - [`so3`]: rotation primitives and parameterization conversions
//! - [`rls`]: the recursive retrospective cost optimizer and its batch oracle
//! - [`rcae`]: the estimator itself
//! - [`mekf`]: quaternion MEKF with gyro-bias state
//! - [`sensors`]: accelerometer/magnetometer orientation and noise models
//! - [`harness`]: synthetic scenarios, log replay, CSV output
//!
//! ```
//! use rcae::so3::{euler321_to_matrix, Euler321, Vec3};
//! use rcae::rcae::{Rcae, RcaeConfig};
//!
//! let truth = euler321_to_matrix(&Euler321::from_degrees(30.0, 20.0, 10.0));
//! let mut estimator = Rcae::new(RcaeConfig::default()).unwrap();
//! let telemetry = estimator.step(&Vec3::zeros(), &truth, 0.01).unwrap();
//! assert!(telemetry.z < 0.0);
//! ```

pub mod error;
pub mod harness;
pub mod mekf;
pub mod rcae;
pub mod rls;
pub mod sensors;
pub mod so3;

pub use error::{EstimatorError, HarnessError, RlsError, SensorError, So3Error};
