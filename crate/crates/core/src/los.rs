//! Sensor view-cone geometry and the nonconvex line-of-sight residual.
//!
//! A keypoint `p` is visible when its sensor-frame representation lies inside
//! the norm cone `‖A_c p_S‖_ρ ≤ cᵀ p_S`, with boresight `c` fixed to the
//! sensor z-axis. The residual `g = ‖A_c p_S‖_ρ − cᵀ p_S` is ≤ 0 exactly on
//! the cone.
//!
//! Frame convention: the state quaternion maps body→inertial and the mount
//! quaternion maps sensor→body, so an inertial-frame offset is brought into
//! the sensor frame through both transposed DCMs. A conformance test below
//! pins this direction (a point straight ahead of a yawed vehicle lands on
//! the boresight).

use nalgebra::{Matrix3, SVector, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::attitude::{dcm_partials, dcm_unchecked, UnitQuaternion};
use crate::dynamics::{VehicleState, IQ, IR, NX};
use crate::{Error, Result};

/// Norm order of the view cone; `L2` is a circular footprint, `LInf`
/// rectangular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormOrder {
    L2,
    LInf,
}

/// Sensor view cone. The boresight is the sensor-frame z-axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViewCone {
    /// Half-angle of the footprint along the sensor x-axis [rad].
    pub alpha: f64,
    /// Half-angle of the footprint along the sensor y-axis [rad].
    pub beta: f64,
    pub norm: NormOrder,
    /// Sensor mount attitude, sensor frame relative to body frame.
    pub mount: UnitQuaternion,
}

/// Boresight vector in the sensor frame.
pub const BORESIGHT: Vector3<f64> = Vector3::new(0.0, 0.0, 1.0);

impl ViewCone {
    /// Footprint matrix `diag(1/tan α, 1/tan β, 0)`.
    pub fn footprint_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(1.0 / self.alpha.tan(), 1.0 / self.beta.tan(), 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, angle) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(angle > 0.0 && angle < std::f64::consts::FRAC_PI_2) {
                return Err(Error::Validation {
                    field: format!("cone.{name}"),
                    message: format!("half-angle must lie in (0, pi/2), got {angle}"),
                });
            }
        }
        if (self.mount.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Validation {
                field: "cone.mount".into(),
                message: "mount quaternion must be unit within 1e-6".into(),
            });
        }
        Ok(())
    }
}

/// A point of interest that must stay visible.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Keypoint {
    Static {
        position: Vector3<f64>,
    },
    Sinusoid {
        base: Vector3<f64>,
        amplitude: Vector3<f64>,
        /// [rad/s]
        angular_frequency: f64,
        /// [rad]
        phase: f64,
    },
}

impl Keypoint {
    /// Inertial position at time `t` [s].
    pub fn position(&self, t: f64) -> Vector3<f64> {
        match self {
            Keypoint::Static { position } => *position,
            Keypoint::Sinusoid { base, amplitude, angular_frequency, phase } => {
                base + amplitude * (angular_frequency * t + phase).sin()
            }
        }
    }

    pub fn is_moving(&self) -> bool {
        match self {
            Keypoint::Static { .. } => false,
            Keypoint::Sinusoid { amplitude, .. } => amplitude.norm() > 0.0,
        }
    }
}

/// Inertial position of keypoint `kp` at time `t`.
pub fn keypoint_position(kp: &Keypoint, t: f64) -> Vector3<f64> {
    kp.position(t)
}

/// Express an inertial keypoint in the sensor frame:
/// `p_S = C(q_S→B)ᵀ C(q_B→I)ᵀ (p_I − r_I)`.
pub fn keypoint_in_sensor_frame(
    p_inertial: &Vector3<f64>,
    r_inertial: &Vector3<f64>,
    attitude: &UnitQuaternion,
    mount: &UnitQuaternion,
) -> Result<Vector3<f64>> {
    for (name, q) in [("attitude", attitude), ("mount", mount)] {
        if (q.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!("{name} quaternion not unit within 1e-6")));
        }
    }
    Ok(sensor_frame_unchecked(p_inertial, r_inertial, attitude, mount))
}

/// Same transform without the unit-norm check; used inside dynamics and
/// Jacobian evaluation where the quaternion is a free optimization variable.
pub fn sensor_frame_unchecked(
    p_inertial: &Vector3<f64>,
    r_inertial: &Vector3<f64>,
    attitude: &UnitQuaternion,
    mount: &UnitQuaternion,
) -> Vector3<f64> {
    let body = dcm_unchecked(attitude).transpose() * (p_inertial - r_inertial);
    dcm_unchecked(mount).transpose() * body
}

/// LoS residual `g = ‖A_c p_S‖_ρ − cᵀ p_S`; `g ≤ 0` iff the point is inside
/// the cone.
pub fn los_residual(p_sensor: &Vector3<f64>, cone: &ViewCone) -> f64 {
    residual_and_sensor_gradient(p_sensor, cone).0
}

/// Residual and its gradient with respect to the sensor-frame point.
///
/// At the `ℓ∞` tie (and at the cone axis where the norm argument vanishes)
/// the lexicographically-first maximizing coordinate is used, with
/// `sign(0) = 0`; ties are measure-zero and the surrounding SCP penalty only
/// needs a deterministic subgradient.
pub fn residual_and_sensor_gradient(
    p_sensor: &Vector3<f64>,
    cone: &ViewCone,
) -> (f64, Vector3<f64>) {
    let a = cone.footprint_matrix();
    let w = a * p_sensor;
    let (norm_val, norm_grad_w): (f64, Vector3<f64>) = match cone.norm {
        NormOrder::L2 => {
            let n = w.norm();
            if n > 0.0 {
                (n, w / n)
            } else {
                (0.0, Vector3::zeros())
            }
        }
        NormOrder::LInf => {
            let mut idx = 0;
            for i in 1..3 {
                if w[i].abs() > w[idx].abs() {
                    idx = i;
                }
            }
            let s = if w[idx] > 0.0 {
                1.0
            } else if w[idx] < 0.0 {
                -1.0
            } else {
                0.0
            };
            let mut grad = Vector3::zeros();
            grad[idx] = s;
            (w[idx].abs(), grad)
        }
    };
    let value = norm_val - BORESIGHT.dot(p_sensor);
    let grad = a.transpose() * norm_grad_w - BORESIGHT;
    (value, grad)
}

/// Residual of a keypoint against the vehicle state plus the gradient with
/// respect to the 13-component state vector (position and quaternion blocks;
/// velocity and rate blocks are zero).
pub fn los_residual_full(
    x: &VehicleState,
    t: f64,
    kp: &Keypoint,
    cone: &ViewCone,
) -> Result<(f64, SVector<f64, NX>)> {
    if (x.attitude.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput("state quaternion not unit within 1e-6".into()));
    }
    Ok(los_residual_full_unchecked(x, t, kp, cone))
}

/// [`los_residual_full`] without the unit-norm precondition; the workhorse
/// for linearization, where quaternions are unconstrained reals.
pub fn los_residual_full_unchecked(
    x: &VehicleState,
    t: f64,
    kp: &Keypoint,
    cone: &ViewCone,
) -> (f64, SVector<f64, NX>) {
    let p_inertial = kp.position(t);
    let offset = p_inertial - x.position;
    let s_mat = dcm_unchecked(&cone.mount);
    let r_mat = dcm_unchecked(&x.attitude);
    let p_sensor = s_mat.transpose() * (r_mat.transpose() * offset);
    let (value, grad_ps) = residual_and_sensor_gradient(&p_sensor, cone);

    let mut grad = SVector::<f64, NX>::zeros();
    // d p_S / d r = −Sᵀ Rᵀ  ⇒  ∂g/∂r = −R S ∇_{p_S} g
    let body_grad = s_mat * grad_ps;
    let d_r = -(r_mat * body_grad);
    for i in 0..3 {
        grad[IR + i] = d_r[i];
    }
    // ∂g/∂q_i = dᵀ (∂R/∂q_i) S ∇_{p_S} g
    let parts = dcm_partials(&x.attitude);
    let mut d_q = Vector4::zeros();
    for i in 0..4 {
        d_q[i] = (parts[i] * body_grad).dot(&offset);
    }
    for i in 0..4 {
        grad[IQ + i] = d_q[i];
    }
    (value, grad)
}
