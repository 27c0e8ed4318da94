//! Six-degree-of-freedom line-of-sight (LoS) guidance by successive
//! convexification.
//!
//! The library plans rigid-body trajectories that keep a set of keypoints
//! inside a sensor view cone. Two formulations are provided:
//!
//! - **CT**: the view-cone constraint (and other nonconvex path constraints)
//!   is enforced in continuous time through an integral penalty state that is
//!   driven to zero, so satisfaction holds between discretization nodes.
//! - **DT**: the baseline that linearizes the constraint at each node and
//!   relaxes it with a penalized buffer, enforcing it at nodes only.
//!
//! Modules:
//! - [`attitude`]: quaternion and rotation kernels
//! - [`dynamics`]: 6-DoF rigid-body dynamics, augmented and time-dilated forms
//! - [`los`]: view-cone geometry and the nonconvex LoS residual
//! - [`discretize`]: first-order-hold exact discretization and propagation
//! - [`subproblem`]: scaling, convex subproblem builders, conic solver bridge
//! - [`prox_linear`]: the outer successive-convexification loop
//! - [`scenario`]: scenario definitions, validation and (de)serialization
//! - [`evaluate`]: post-solve metrics, sweeps and result export

pub mod attitude;
pub mod discretize;
pub mod dynamics;
pub mod evaluate;
pub mod los;
pub mod prox_linear;
pub mod scenario;
pub mod subproblem;

pub use attitude::UnitQuaternion;
pub use dynamics::{AugmentedControl, AugmentedState, ControlInput, VehicleParams, VehicleState};
pub use los::{Keypoint, NormOrder, ViewCone};
pub use prox_linear::{solve, Method, SolveLog, SolveOptions, SolveOutput};
pub use scenario::{Gate, Scenario, Weights};

/// Errors produced by the guidance library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("scenario validation failed for `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("non-finite value while {context} (index {index})")]
    NonFinite { context: &'static str, index: usize },
    #[error("subproblem construction: {0}")]
    Construction(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
