//! Rotation-group primitives.
//!
//! An [`OrientationMatrix`] `O_{B/A}` resolves A-frame coordinates into the
//! B frame: `x_B = O_{B/A} x_A`. It is the transpose of the direction cosine
//! matrix that maps body coordinates back to the reference frame. Every
//! conversion in this module is written against that convention, so the
//! elementary Euler rotation about axis `i` by angle `a` is `exp_so3(-a e_i)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::So3Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Below this rotation magnitude `exp_so3` switches to its series branch.
pub const SMALL_ANGLE: f64 = 1e-6;
/// Axis-angle extraction treats angles below this as having no defined axis.
pub const DEGENERATE_ANGLE: f64 = 1e-7;
/// Distance from pi at which axis extraction uses the diagonal branch.
pub const NEAR_PI_MARGIN: f64 = 1e-4;

const ORTHONORMAL_TOL: f64 = 1e-9;
const REPROJECT_LIMIT: f64 = 1e-3;

/// Skew-symmetric matrix `v^x` with `v^x w = v x w`.
pub fn cross_matrix(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`cross_matrix`]. Only the skew part of `m` is read.
pub fn uncross(m: &Mat3) -> Result<Vec3, So3Error> {
    let asym = (m + m.transpose()).norm();
    if asym > 1e-6 * m.norm() {
        return Err(So3Error::NotSkew { asymmetry: asym });
    }
    Ok(skew_vector(m))
}

/// Vector of the skew part of an arbitrary matrix, `((M - M^T)/2)^{-x}`.
fn skew_vector(m: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// An element of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationMatrix(Mat3);

impl OrientationMatrix {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Accepts `m` if it is a rotation to within 1e-9, re-projects it onto
    /// SO(3) if it has drifted by less than 1e-3, and rejects it otherwise.
    pub fn new(m: Mat3) -> Result<Self, So3Error> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(So3Error::NotFinite);
        }
        let defect = orthonormality_defect(&m);
        let det = m.determinant();
        if defect <= ORTHONORMAL_TOL && (det - 1.0).abs() <= ORTHONORMAL_TOL {
            return Ok(Self(m));
        }
        if defect < REPROJECT_LIMIT && det > 0.0 {
            return project_to_so3(&m);
        }
        Err(So3Error::NotOrthonormal { defect, det })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Coordinates of an A-frame vector resolved in the B frame.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// `||O^T O - I||_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.0)
    }

    /// Re-projects onto SO(3) if float drift has exceeded 1e-12.
    pub fn renormalized(self) -> Self {
        let m = &self.0;
        if orthonormality_defect(m) <= 1e-12 && (m.determinant() - 1.0).abs() <= 1e-12 {
            return self;
        }
        project_to_so3(m).unwrap_or(self)
    }
}

impl Mul for OrientationMatrix {
    type Output = OrientationMatrix;

    fn mul(self, rhs: OrientationMatrix) -> OrientationMatrix {
        OrientationMatrix(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for OrientationMatrix {
    type Output = Vec3;

    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

fn orthonormality_defect(m: &Mat3) -> f64 {
    (m.transpose() * m - Mat3::identity()).norm()
}

/// Which branch of the axis extraction produced an [`AxisAngle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisDegeneracy {
    /// Regular case, axis from the skew part.
    None,
    /// Angle below [`DEGENERATE_ANGLE`]; the axis is the `(0, 0, 1)` convention.
    SmallAngle,
    /// Angle within [`NEAR_PI_MARGIN`] of pi; axis from the symmetric part,
    /// and its sign is ambiguous exactly at pi.
    NearPi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    /// Rotation angle in `[0, pi]`, radians.
    pub angle: f64,
    /// Unit eigenaxis.
    pub axis: Vec3,
    pub degeneracy: AxisDegeneracy,
}

impl AxisAngle {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy == AxisDegeneracy::SmallAngle
    }

    pub fn rotation_vector(&self) -> Vec3 {
        self.axis * self.angle
    }
}

/// Matrix exponential `e^{v^x}` by the Rodrigues closed form.
pub fn exp_so3(v: &Vec3) -> OrientationMatrix {
    let theta = v.norm();
    let k = cross_matrix(v);
    let k2 = k * k;
    let m = if theta < SMALL_ANGLE {
        Mat3::identity() + k + k2 * 0.5
    } else {
        Mat3::identity() + k * (theta.sin() / theta) + k2 * ((1.0 - theta.cos()) / (theta * theta))
    };
    OrientationMatrix(m)
}

/// Angle and eigenaxis of a rotation, with `exp_so3(angle * axis) = O`.
pub fn axis_angle(o: &OrientationMatrix) -> AxisAngle {
    let m = o.matrix();
    // s = sin(angle) * axis, c = cos(angle)
    let s = skew_vector(m);
    let c = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let sin_norm = s.norm();
    let angle = sin_norm.atan2(c);

    if angle < DEGENERATE_ANGLE {
        return AxisAngle {
            angle,
            axis: Vec3::z(),
            degeneracy: AxisDegeneracy::SmallAngle,
        };
    }
    if angle <= PI - NEAR_PI_MARGIN {
        return AxisAngle {
            angle,
            axis: s / sin_norm,
            degeneracy: AxisDegeneracy::None,
        };
    }

    // Symmetric part is cos(a) I + (1 - cos(a)) n n^T.
    let sym = (m + m.transpose()) * 0.5;
    let nnt = (sym - Mat3::identity() * c) / (1.0 - c);
    let pivot = (0..3)
        .max_by(|&i, &j| nnt[(i, i)].total_cmp(&nnt[(j, j)]))
        .unwrap_or(0);
    let mut axis: Vec3 = nnt.column(pivot).into();
    axis /= axis.norm();
    if axis.dot(&s) < 0.0 {
        axis = -axis;
    }
    AxisAngle {
        angle,
        axis,
        degeneracy: AxisDegeneracy::NearPi,
    }
}

/// Attitude error `tr(O1^T O2 - I)`, in `[-4, 0]` and zero iff `O1 = O2`.
pub fn attitude_error(o1: &OrientationMatrix, o2: &OrientationMatrix) -> f64 {
    // for rotations tr(O1^T O2) - 3 = -||O1 - O2||_F^2 / 2, without cancellation
    (-0.5 * (o1.matrix() - o2.matrix()).norm_squared()).clamp(-4.0, 0.0)
}

/// `O_est O_meas^T`, the orientation of the estimated frame relative to the
/// measured one.
pub fn relative_orientation(
    estimate: &OrientationMatrix,
    measured: &OrientationMatrix,
) -> OrientationMatrix {
    (*estimate * measured.transpose()).renormalized()
}

/// Closest rotation to `m` in Frobenius norm (polar factor via SVD).
pub fn project_to_so3(m: &Mat3) -> Result<OrientationMatrix, So3Error> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(So3Error::NotFinite);
    }
    let det = m.determinant();
    let svd = m.svd(true, true);
    let smallest = svd.singular_values.min();
    if det <= 0.0 || smallest < 1e-9 {
        return Err(So3Error::Degenerate {
            smallest_singular_value: smallest,
        });
    }
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(So3Error::Degenerate {
            smallest_singular_value: smallest,
        });
    };
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let flip = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        r = u * flip * v_t;
    }
    Ok(OrientationMatrix(r))
}

/// 3-2-1 (yaw, pitch, roll) Euler angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler321 {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl Euler321 {
    pub fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self { yaw, pitch, roll }
    }

    pub fn from_degrees(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self::new(yaw.to_radians(), pitch.to_radians(), roll.to_radians())
    }

    pub fn to_degrees(&self) -> [f64; 3] {
        [
            self.yaw.to_degrees(),
            self.pitch.to_degrees(),
            self.roll.to_degrees(),
        ]
    }

    /// Equivalent angles in the canonical ranges: yaw and roll in `(-pi, pi]`,
    /// pitch in `[-pi/2, pi/2]`.
    pub fn wrapped(&self) -> Self {
        let mut pitch = wrap_angle(self.pitch);
        let mut yaw = self.yaw;
        let mut roll = self.roll;
        if pitch > FRAC_PI_2 {
            pitch = PI - pitch;
            yaw += PI;
            roll += PI;
        } else if pitch < -FRAC_PI_2 {
            pitch = -PI - pitch;
            yaw += PI;
            roll += PI;
        }
        Self {
            yaw: wrap_angle(yaw),
            pitch,
            roll: wrap_angle(roll),
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// `O1(roll) O2(pitch) O3(yaw)`.
pub fn euler321_to_matrix(e: &Euler321) -> OrientationMatrix {
    let (sy, cy) = e.yaw.sin_cos();
    let (sp, cp) = e.pitch.sin_cos();
    let (sr, cr) = e.roll.sin_cos();
    OrientationMatrix(Mat3::new(
        cp * cy,
        cp * sy,
        -sp,
        sr * sp * cy - cr * sy,
        sr * sp * sy + cr * cy,
        sr * cp,
        cr * sp * cy + sr * sy,
        cr * sp * sy - sr * cy,
        cr * cp,
    ))
}

/// Result of [`matrix_to_euler321`]. At gimbal lock roll is set to zero and
/// yaw absorbs the combined angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDecomposition {
    pub angles: Euler321,
    pub gimbal_lock: bool,
}

impl EulerDecomposition {
    pub fn strict(self) -> Result<Euler321, So3Error> {
        if self.gimbal_lock {
            Err(So3Error::GimbalLock {
                pitch: self.angles.pitch,
            })
        } else {
            Ok(self.angles)
        }
    }
}

pub fn matrix_to_euler321(o: &OrientationMatrix) -> EulerDecomposition {
    let m = o.matrix();
    let sin_pitch = (-m[(0, 2)]).clamp(-1.0, 1.0);
    if sin_pitch.abs() > 1.0 - 1e-9 {
        let yaw = (-m[(1, 0)]).atan2(m[(1, 1)]);
        return EulerDecomposition {
            angles: Euler321::new(canonical(yaw), FRAC_PI_2.copysign(sin_pitch), 0.0),
            gimbal_lock: true,
        };
    }
    let yaw = m[(0, 1)].atan2(m[(0, 0)]);
    let roll = m[(1, 2)].atan2(m[(2, 2)]);
    // atan2 of the off-axis pair keeps precision near +-pi/2
    let cos_pitch = (m[(0, 0)].powi(2) + m[(0, 1)].powi(2)).sqrt();
    let pitch = sin_pitch.atan2(cos_pitch);
    EulerDecomposition {
        angles: Euler321::new(canonical(yaw), pitch, canonical(roll)),
        gimbal_lock: false,
    }
}

fn canonical(a: f64) -> f64 {
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Unit quaternion `[eta; eps]` whose matrix is `I - 2 eta eps^x + 2 (eps^x)^2`.
///
/// Rotation by `angle` about `n` (`exp_so3(angle * n)`) is
/// `eta = cos(angle/2)`, `eps = -sin(angle/2) n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion {
    pub eta: f64,
    pub eps: Vec3,
}

impl UnitQuaternion {
    pub fn identity() -> Self {
        Self {
            eta: 1.0,
            eps: Vec3::zeros(),
        }
    }

    /// Normalizes `(eta, eps)`; `None` for a zero or non-finite input.
    pub fn new(eta: f64, eps: Vec3) -> Option<Self> {
        let n = (eta * eta + eps.norm_squared()).sqrt();
        if !n.is_finite() || n < 1e-12 {
            return None;
        }
        Some(Self {
            eta: eta / n,
            eps: eps / n,
        })
    }

    pub fn from_rotation_vector(v: &Vec3) -> Self {
        let angle = v.norm();
        if angle < SMALL_ANGLE {
            // second-order expansion, renormalized
            let half = -0.5 * v;
            return Self::new(1.0 - angle * angle / 8.0, half).unwrap_or_else(Self::identity);
        }
        let (s, c) = (0.5 * angle).sin_cos();
        Self {
            eta: c,
            eps: -v * (s / angle),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.eta * self.eta + self.eps.norm_squared()).sqrt()
    }

    pub fn normalized(&self) -> Self {
        Self::new(self.eta, self.eps).unwrap_or_else(Self::identity)
    }

    /// Quaternion of the product `O(self) O(rhs)`.
    pub fn compose(&self, rhs: &UnitQuaternion) -> UnitQuaternion {
        // With this sign convention the matrix product maps to the
        // Hamilton product in reversed order.
        let (a0, a) = (rhs.eta, rhs.eps);
        let (b0, b) = (self.eta, self.eps);
        UnitQuaternion {
            eta: a0 * b0 - a.dot(&b),
            eps: b * a0 + a * b0 + a.cross(&b),
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.eta, self.eps.x, self.eps.y, self.eps.z]
    }
}

pub fn quat_to_matrix(q: &UnitQuaternion) -> OrientationMatrix {
    let q = q.normalized();
    let e = cross_matrix(&q.eps);
    OrientationMatrix(Mat3::identity() - e * (2.0 * q.eta) + e * e * 2.0)
}

/// Shepperd's method; returns the `eta >= 0` branch.
pub fn matrix_to_quat(o: &OrientationMatrix) -> UnitQuaternion {
    let m = o.matrix();
    let tr = m.trace();
    let d = [m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    let (eta, eps) = if tr >= d[0] && tr >= d[1] && tr >= d[2] {
        let eta = 0.5 * (1.0 + tr).sqrt();
        let f = 0.25 / eta;
        (
            eta,
            Vec3::new(
                (m[(1, 2)] - m[(2, 1)]) * f,
                (m[(2, 0)] - m[(0, 2)]) * f,
                (m[(0, 1)] - m[(1, 0)]) * f,
            ),
        )
    } else if d[0] >= d[1] && d[0] >= d[2] {
        let e0 = 0.5 * (1.0 + d[0] - d[1] - d[2]).sqrt();
        let f = 0.25 / e0;
        (
            (m[(1, 2)] - m[(2, 1)]) * f,
            Vec3::new(e0, (m[(0, 1)] + m[(1, 0)]) * f, (m[(0, 2)] + m[(2, 0)]) * f),
        )
    } else if d[1] >= d[2] {
        let e1 = 0.5 * (1.0 - d[0] + d[1] - d[2]).sqrt();
        let f = 0.25 / e1;
        (
            (m[(2, 0)] - m[(0, 2)]) * f,
            Vec3::new((m[(0, 1)] + m[(1, 0)]) * f, e1, (m[(1, 2)] + m[(2, 1)]) * f),
        )
    } else {
        let e2 = 0.5 * (1.0 - d[0] - d[1] + d[2]).sqrt();
        let f = 0.25 / e2;
        (
            (m[(0, 1)] - m[(1, 0)]) * f,
            Vec3::new((m[(0, 2)] + m[(2, 0)]) * f, (m[(1, 2)] + m[(2, 1)]) * f, e2),
        )
    };
    let q = UnitQuaternion::new(eta, eps).unwrap_or_else(UnitQuaternion::identity);
    if q.eta < 0.0 {
        UnitQuaternion {
            eta: -q.eta,
            eps: -q.eps,
        }
    } else {
        q
    }
}
