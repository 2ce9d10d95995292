//! MEKF bias estimation from noiseless gravity and field directions with a
//! small bias process noise. Pass r_mag as the first argument to try another
//! magnetic variance.

use rcae::mekf::{Mekf, MekfConfig};
use nalgebra::{Matrix6, Vector6};
use rcae::so3::{attitude_error, euler321_to_matrix, exp_so3, Euler321, Vec3};

fn main() {
    let r_mag: f64 = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(0.01);
    let cfg = MekfConfig {
        r: Matrix6::from_diagonal(&Vector6::new(0.01, 0.01, 0.01, r_mag, r_mag, r_mag)),
        q: Matrix6::from_diagonal(&Vector6::new(1e-4, 1e-4, 1e-4, 1e-6, 1e-6, 1e-6)),
        ..MekfConfig::default()
    };
    let dt = cfg.dt;
    let bias = Vec3::new(5.0, 7.0, 4.0).map(f64::to_radians);
    let mut truth = euler321_to_matrix(&Euler321::from_degrees(30.0, 20.0, 10.0));
    let mut filter = Mekf::new(cfg).unwrap();

    for k in 0..3000 {
        let t = k as f64 * dt;
        let omega = Vec3::new(0.5 * t.cos(), 0.3 * (2.0 * t).sin(), 0.2);
        filter.update_orientation(&truth).unwrap();
        if k % 500 == 0 {
            let s = filter.state();
            let b = s.bias.map(f64::to_degrees);
            println!(
                "t = {t:>5.1} s: z = {:+.3e}, bias [{:.3}, {:.3}, {:.3}] deg/s, |q| - 1 = {:.1e}",
                attitude_error(&s.orientation(), &truth),
                b.x,
                b.y,
                b.z,
                s.q.norm() - 1.0
            );
        }
        filter.predict(&(omega + bias), dt);
        truth = exp_so3(&(-omega * dt)) * truth;
    }
    let b = filter.state().bias.map(f64::to_degrees);
    println!("final bias [{:.3}, {:.3}, {:.3}] deg/s, true [5, 7, 4]", b.x, b.y, b.z);
}
