use std::f64::consts::PI;

use proptest::prelude::*;
use rcae::so3::*;

fn rotation_vector(max_angle: f64) -> impl Strategy<Value = Vec3> {
    (
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        0.0f64..max_angle,
    )
        .prop_filter("non-zero direction", |(x, y, z, _)| x * x + y * y + z * z > 1e-6)
        .prop_map(|(x, y, z, a)| Vec3::new(x, y, z).normalize() * a)
}

proptest! {
    #[test]
    fn exp_is_a_rotation(v in rotation_vector(20.0)) {
        let o = exp_so3(&v);
        prop_assert!(o.orthonormality_defect() < 1e-12);
        prop_assert!((o.matrix().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axis_angle_inverts_exp(v in rotation_vector(PI - 1e-3)) {
        prop_assume!(v.norm() > 1e-6);
        let aa = axis_angle(&exp_so3(&v));
        prop_assert!((aa.rotation_vector() - v).norm() < 1e-9);
    }

    #[test]
    fn quaternion_round_trip(v in rotation_vector(PI)) {
        let o = exp_so3(&v);
        let q = matrix_to_quat(&o);
        prop_assert!((q.norm() - 1.0).abs() < 1e-12);
        prop_assert!(q.eta >= 0.0);
        prop_assert!((quat_to_matrix(&q).matrix() - o.matrix()).norm() < 1e-12);
        let q2 = UnitQuaternion::from_rotation_vector(&v);
        prop_assert!((quat_to_matrix(&q2).matrix() - o.matrix()).norm() < 1e-12);
    }

    #[test]
    fn quaternion_composition_matches_matrix_product(a in rotation_vector(PI), b in rotation_vector(PI)) {
        let qa = UnitQuaternion::from_rotation_vector(&a);
        let qb = UnitQuaternion::from_rotation_vector(&b);
        let product = exp_so3(&a) * exp_so3(&b);
        prop_assert!((quat_to_matrix(&qa.compose(&qb)).matrix() - product.matrix()).norm() < 1e-12);
    }

    #[test]
    fn euler_round_trip_away_from_gimbal_lock(
        yaw in -PI..PI,
        pitch in -1.5f64..1.5,
        roll in -PI..PI,
    ) {
        let e = Euler321::new(yaw, pitch, roll);
        let back = matrix_to_euler321(&euler321_to_matrix(&e));
        prop_assert!(!back.gimbal_lock);
        let d = [back.angles.yaw - yaw, back.angles.pitch - pitch, back.angles.roll - roll];
        for x in d {
            prop_assert!(wrap_angle(x).abs() < 1e-9);
        }
    }

    #[test]
    fn attitude_error_is_conjugation_invariant(
        a in rotation_vector(PI),
        b in rotation_vector(PI),
        r in rotation_vector(PI),
    ) {
        let (o1, o2, rot) = (exp_so3(&a), exp_so3(&b), exp_so3(&r));
        let z = attitude_error(&o1, &o2);
        prop_assert!((-4.0..=0.0).contains(&z));
        prop_assert!((attitude_error(&(rot * o1), &(rot * o2)) - z).abs() < 1e-12);
        prop_assert!((attitude_error(&(o1 * rot), &(o2 * rot)) - z).abs() < 1e-12);
        prop_assert!((attitude_error(&o2, &o1) - z).abs() < 1e-12);
    }

    #[test]
    fn attitude_error_matches_relative_angle(a in rotation_vector(PI), b in rotation_vector(PI)) {
        let (o1, o2) = (exp_so3(&a), exp_so3(&b));
        let angle = axis_angle(&relative_orientation(&o1, &o2)).angle;
        prop_assert!((attitude_error(&o1, &o2) - (2.0 * angle.cos() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn projection_recovers_perturbed_rotations(v in rotation_vector(PI), noise in prop::array::uniform9(-1e-4f64..1e-4)) {
        let o = exp_so3(&v);
        let m = o.matrix() + Mat3::from_row_slice(&noise);
        let p = project_to_so3(&m).unwrap();
        prop_assert!(p.orthonormality_defect() < 1e-12);
        prop_assert!((p.matrix() - o.matrix()).norm() < 1e-3);
    }
}
