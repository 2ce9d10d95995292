//! Rotation primitives: exponential map, eigenaxis, quaternions, Euler
//! angles and the trace attitude error.

use rcae::so3::*;

fn main() {
    let v = Vec3::new(0.3, -0.2, 0.9);
    let o = exp_so3(&v);
    println!("exp([0.3, -0.2, 0.9]) =\n{}", o.matrix());
    println!("orthonormality defect {:.2e}", o.orthonormality_defect());

    let aa = axis_angle(&o);
    println!("axis {:?}, angle {:.6} rad, degeneracy {:?}", aa.axis.as_slice(), aa.angle, aa.degeneracy);

    let q = matrix_to_quat(&o);
    let back = quat_to_matrix(&q);
    println!("quaternion {:?}, round trip error {:.2e}", q.to_array(), (back.matrix() - o.matrix()).norm());

    let e = matrix_to_euler321(&o);
    let [yaw, pitch, roll] = e.angles.to_degrees();
    println!("3-2-1 Euler: yaw {yaw:.3}, pitch {pitch:.3}, roll {roll:.3} deg (gimbal lock: {})", e.gimbal_lock);

    // z = 2 cos(angle) - 2 between two orientations
    for deg in [0.0, 10.0, 90.0, 180.0] {
        let other = exp_so3(&(Vec3::z() * f64::to_radians(deg))) * o;
        println!("rotated by {deg:>5} deg: z = {:+.6}", attitude_error(&o, &other));
    }

    let noisy = o.matrix() + Mat3::repeat(1e-3);
    let projected = project_to_so3(&noisy).unwrap();
    println!("projected perturbed matrix, defect {:.2e}", projected.orthonormality_defect());
}
