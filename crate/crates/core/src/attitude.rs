//! Quaternion and rotation kernels shared by the dynamics and constraint code.
//!
//! Conventions (pinned by the conformance tests at the bottom of this file):
//! scalar-first Hamilton quaternions, `q = [w x y z]`. A state quaternion
//! parameterizes the attitude of the body frame relative to the inertial
//! frame, so [`quat_to_dcm`] maps body-frame vectors into the inertial frame
//! and the kinematics are `q̇ = ½ Ω(ω_B) q` for body rates `ω_B`.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Scalar-first unit quaternion `[w x y z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// 3x3 direction cosine matrix.
pub type RotationMatrix = Matrix3<f64>;

impl UnitQuaternion {
    pub const IDENTITY: Self = Self { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Quaternion for a rotation of `angle` radians about `axis`.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::IDENTITY;
        }
        let half = 0.5 * angle;
        let k = half.sin() / n;
        Self { w: half.cos(), x: axis.x * k, y: axis.y * k, z: axis.z * k }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Rescale to unit norm. Norm is 1 within 1e-9 afterwards.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
    }

    /// Hamilton product `self ⊗ rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let (aw, ax, ay, az) = (self.w, self.x, self.y, self.z);
        let (bw, bx, by, bz) = (rhs.w, rhs.x, rhs.y, rhs.z);
        Self {
            w: aw * bw - ax * bx - ay * by - az * bz,
            x: aw * bx + ax * bw + ay * bz - az * by,
            y: aw * by - ax * bz + ay * bw + az * bx,
            z: aw * bz + ax * by - ay * bx + az * bw,
        }
    }

    pub fn conjugate(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::new(self.w, self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self { w: v[0], x: v[1], y: v[2], z: v[3] }
    }
}

/// Direction cosine matrix of `q`, mapping body-frame vectors to the inertial
/// frame. Errors if `q` is not unit within 1e-6.
pub fn quat_to_dcm(q: &UnitQuaternion) -> Result<RotationMatrix> {
    let n = q.norm();
    if (n - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "quaternion norm {n} deviates from 1 by more than 1e-6"
        )));
    }
    Ok(dcm_unchecked(q))
}

/// DCM evaluated without the unit-norm check. The optimizer treats the
/// quaternion as four unconstrained reals, so dynamics and Jacobians use this
/// form directly; linearization points are renormalized upstream.
pub fn dcm_unchecked(q: &UnitQuaternion) -> RotationMatrix {
    let (w, x, y, z) = (q.w, q.x, q.y, q.z);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// Partial derivatives of [`dcm_unchecked`] with respect to `[w x y z]`.
pub fn dcm_partials(q: &UnitQuaternion) -> [Matrix3<f64>; 4] {
    let (w, x, y, z) = (q.w, q.x, q.y, q.z);
    let dw = 2.0 * Matrix3::new(0.0, -z, y, z, 0.0, -x, -y, x, 0.0);
    let dx = 2.0 * Matrix3::new(0.0, y, z, y, -2.0 * x, -w, z, w, -2.0 * x);
    let dy = 2.0 * Matrix3::new(-2.0 * y, x, w, x, 0.0, z, -w, z, -2.0 * y);
    let dz = 2.0 * Matrix3::new(-2.0 * z, -w, x, w, -2.0 * z, y, x, y, 0.0);
    [dw, dx, dy, dz]
}

/// 4x4 matrix `Ω(ω)` with `q̇ = ½ Ω(ω) q`, equivalent to `q̇ = ½ q ⊗ (0, ω)`.
pub fn omega_matrix(omega: &Vector3<f64>) -> Matrix4<f64> {
    let (p, q, r) = (omega.x, omega.y, omega.z);
    Matrix4::new(
        0.0, -p, -q, -r, //
        p, 0.0, r, -q, //
        q, -r, 0.0, p, //
        r, q, -p, 0.0,
    )
}

/// 4x3 matrix `Ξ(q)` with `q̇ = ½ Ξ(q) ω`; the ω-Jacobian of the kinematics.
pub fn xi_matrix(q: &UnitQuaternion) -> nalgebra::Matrix4x3<f64> {
    let (w, x, y, z) = (q.w, q.x, q.y, q.z);
    nalgebra::Matrix4x3::new(
        -x, -y, -z, //
        w, -z, y, //
        z, w, -x, //
        -y, x, w,
    )
}

/// Cross-product matrix: `skew(ξ) · a = ξ × a`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn random_unit_quat(s: u64) -> UnitQuaternion {
        // cheap deterministic scatter over S^3
        let f = |k: u64| ((s.wrapping_mul(6364136223846793005).wrapping_add(k * 9279) >> 11) as f64
            / (1u64 << 53) as f64)
            * 2.0
            - 1.0;
        UnitQuaternion::new(f(1), f(2), f(3), f(4)).normalized()
    }

    #[test]
    fn identity_quat_gives_identity_dcm() {
        let r = quat_to_dcm(&UnitQuaternion::IDENTITY).unwrap();
        assert_abs_diff_eq!(r, Matrix3::identity(), epsilon = 1e-15);
    }

    #[test]
    fn half_turn_about_x() {
        // axis-angle oracle: 180 deg about x maps (x,y,z) -> (x,-y,-z)
        let q = UnitQuaternion::new(0.0, 1.0, 0.0, 0.0);
        let r = quat_to_dcm(&q).unwrap();
        assert_abs_diff_eq!(r, Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0)), epsilon = 1e-15);
    }

    #[test]
    fn dcm_is_orthogonal_for_random_unit_quats() {
        for s in 0..50u64 {
            let q = random_unit_quat(s);
            let r = quat_to_dcm(&q).unwrap();
            assert_abs_diff_eq!(r.transpose() * r, Matrix3::identity(), epsilon = 1e-12);
            assert_abs_diff_eq!(r.determinant(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn non_unit_quat_rejected() {
        let q = UnitQuaternion::new(1.0, 0.1, 0.0, 0.0);
        assert!(quat_to_dcm(&q).is_err());
    }

    #[test]
    fn double_cover() {
        let q = random_unit_quat(7);
        let neg = UnitQuaternion::new(-q.w, -q.x, -q.y, -q.z);
        assert_abs_diff_eq!(quat_to_dcm(&q).unwrap(), quat_to_dcm(&neg).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn composition_matches_matrix_product() {
        for s in 0..20u64 {
            let q1 = random_unit_quat(2 * s + 1);
            let q2 = random_unit_quat(3 * s + 2);
            let lhs = quat_to_dcm(&q1.mul(&q2)).unwrap();
            let rhs = quat_to_dcm(&q1).unwrap() * quat_to_dcm(&q2).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
        }
    }

    #[test]
    fn omega_zero_rate_is_zero() {
        assert_eq!(omega_matrix(&Vector3::zeros()), Matrix4::zeros());
    }

    #[test]
    fn omega_matches_hamilton_product() {
        let q = random_unit_quat(11);
        let w = Vector3::new(0.3, -1.2, 2.0);
        let via_matrix = 0.5 * omega_matrix(&w) * q.as_vector();
        let via_product = q.mul(&UnitQuaternion::new(0.0, 0.5 * w.x, 0.5 * w.y, 0.5 * w.z));
        assert_abs_diff_eq!(via_matrix, via_product.as_vector(), epsilon = 1e-15);
    }

    /// Convention conformance: integrating q̇ = ½Ω(ω)q at constant single-axis
    /// rate must land on the closed-form axis-angle quaternion.
    #[test]
    fn single_axis_integration_matches_axis_angle() {
        let rate = 0.9; // rad/s about body x
        let omega = Vector3::new(rate, 0.0, 0.0);
        let t_end = 1.7;
        let n = 2000;
        let dt = t_end / n as f64;
        let mut q = UnitQuaternion::IDENTITY.as_vector();
        for _ in 0..n {
            // RK4 on the linear ODE
            let f = |qv: Vector4<f64>| 0.5 * omega_matrix(&omega) * qv;
            let k1 = f(q);
            let k2 = f(q + 0.5 * dt * k1);
            let k3 = f(q + 0.5 * dt * k2);
            let k4 = f(q + dt * k3);
            q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            q = UnitQuaternion::from_vector(&q).normalized().as_vector();
        }
        let expected = UnitQuaternion::from_axis_angle(Vector3::x(), rate * t_end);
        assert_abs_diff_eq!(q, expected.as_vector(), epsilon = 1e-8);
    }

    #[test]
    fn dcm_partials_match_finite_differences() {
        let q = random_unit_quat(5);
        let parts = dcm_partials(&q);
        let h = 1e-7;
        for i in 0..4 {
            let mut qp = q.as_vector();
            let mut qm = q.as_vector();
            qp[i] += h;
            qm[i] -= h;
            let fd = (dcm_unchecked(&UnitQuaternion::from_vector(&qp))
                - dcm_unchecked(&UnitQuaternion::from_vector(&qm)))
                / (2.0 * h);
            assert_abs_diff_eq!(parts[i], fd, epsilon = 1e-6);
        }
    }

    proptest! {
        #[test]
        fn skew_matches_cross_product(a in prop::array::uniform3(-10.0f64..10.0),
                                      b in prop::array::uniform3(-10.0f64..10.0)) {
            let a = Vector3::from(a);
            let b = Vector3::from(b);
            let lhs = skew(&a) * b;
            let rhs = a.cross(&b);
            prop_assert!((lhs - rhs).norm() < 1e-12);
            // anticommutativity and self-annihilation
            prop_assert!((skew(&a) * b + skew(&b) * a).norm() < 1e-12);
            prop_assert!((skew(&a) * a).norm() < 1e-12);
        }

        #[test]
        fn omega_is_skew_symmetric(w in prop::array::uniform3(-10.0f64..10.0)) {
            let m = omega_matrix(&Vector3::from(w));
            prop_assert!((m + m.transpose()).norm() < 1e-12);
        }

        #[test]
        fn skew_right_hand_rule_example(_x in 0..1i32) {
            let v = skew(&Vector3::x()) * Vector3::y();
            prop_assert!((v - Vector3::z()).norm() < 1e-15);
        }
    }
}
