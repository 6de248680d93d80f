//! Geodesics on Stiefel and Grassmann manifolds.
//!
//! * [`matcore`]: dense matrices and the few factorizations the geometry needs.
//! * [`stiefel`]: closed-form exponential map, span reduction and a shooting
//!   log map for St(p, ℝⁿ).
//! * [`grassmann`]: the quotients by O(p) and SO(p), principal angles and
//!   horizontal lifts of paths.
//! * [`shapes`]: closed planar curves as 2-frames, with distances modulo
//!   translation, scaling and rotation.
//! * [`cli`]: the `stgeo` command-line tool.

pub mod cli;
pub mod error;
pub mod grassmann;
pub mod io;
pub mod matcore;
pub mod random;
pub mod shapes;
pub mod stiefel;

pub use error::{Error, Result};
pub use grassmann::{
    grassmann_distance, grassmann_exp, grassmann_log, horizontal_project, horizontality_defect,
    horizontalize_path, principal_angle_distance, principal_angles, GrassmannPoint, RotationPath,
};
pub use matcore::Matrix;
pub use shapes::{
    curve_distance, curve_distance_mod_rotation, curve_to_frame, frame_to_curve, CurveFrame,
    PlanarCurve,
};
pub use stiefel::{
    embed_frame, geodesic_residual, geodesic_sample, path_length, perturb_independent,
    project_tangent, reduce_to_span, stiefel_distance, stiefel_exp, stiefel_log, ShootingConfig,
    StiefelPoint, TangentVector,
};
