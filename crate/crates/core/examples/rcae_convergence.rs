//! Drives the estimator directly with a gyro bias and exact orientation
//! measurements, printing the attitude error and adapted gains.

use rcae::rcae::{dead_reckon_step, Rcae, RcaeConfig};
use rcae::so3::{attitude_error, euler321_to_matrix, exp_so3, Euler321, Vec3};

fn main() {
    let dt = 0.01;
    let bias = Vec3::new(5.0, 7.0, 4.0).map(f64::to_radians);
    let mut truth = euler321_to_matrix(&Euler321::from_degrees(30.0, 20.0, 10.0));
    let mut estimator = Rcae::new(RcaeConfig::default()).unwrap();
    let mut dead_reckoned = *estimator.estimate();

    for k in 0..2000 {
        let t = k as f64 * dt;
        let omega = Vec3::new(80.0 * (5.0 * t).cos(), 60.0 * (7.0 * t).cos(), 40.0 * (9.0 * t).cos()).map(f64::to_radians);
        let gyro = omega + bias;
        let tel = estimator.step(&gyro, &truth, dt).unwrap();
        dead_reckoned = dead_reckon_step(&dead_reckoned, &gyro, dt);
        if k % 200 == 0 {
            println!(
                "t = {t:>5.2} s: z = {:+.3e}, dead reckoning z = {:+.3e}, gains [{:+.4}, {:+.4}, {:+.4}]",
                tel.z,
                attitude_error(&dead_reckoned, &truth),
                tel.theta[0],
                tel.theta[1],
                tel.theta[2]
            );
        }
        truth = exp_so3(&(-omega * dt)) * truth;
    }
    println!("final z = {:+.3e}", attitude_error(estimator.estimate(), &truth));
}
