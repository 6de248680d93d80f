//! The Grassmannian Gr(p, ℝⁿ) = St(p, ℝⁿ)/O(p) and its oriented cover
//! Gr₊(p, ℝⁿ) = St(p, ℝⁿ)/SO(p).
//!
//! A subspace is carried by any frame spanning it. Tangent vectors of the
//! quotient are horizontal Stiefel tangents (`xᵀh = 0`), and horizontal
//! Stiefel geodesics project onto Grassmann geodesics.

mod horizontal;

pub use horizontal::{horizontal_project, horizontality_defect, horizontalize_path, RotationPath};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::GrassmannJson;
use crate::matcore::{polar_factor, svd_factor, Matrix};
use crate::stiefel::{
    project_tangent, shoot_to_span, stiefel_exp, stiefel_log, ShootingConfig, StiefelPoint,
    TangentVector,
};

/// Projector distance below which two subspaces are considered equal.
pub const SUBSPACE_TOL: f64 = 1e-9;
/// Bound on `‖xᵀh‖_F` for a horizontal vector.
pub const HORIZONTAL_TOL: f64 = 1e-8;
/// Projector distance the log map must reach before it is accepted.
const FIBER_TOL: f64 = 1e-8;

/// A (possibly oriented) p-dimensional subspace, carried by a frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GrassmannJson", into = "GrassmannJson")]
pub struct GrassmannPoint {
    representative: StiefelPoint,
    oriented: bool,
}

impl GrassmannPoint {
    pub fn new(representative: StiefelPoint, oriented: bool) -> Self {
        GrassmannPoint {
            representative,
            oriented,
        }
    }

    pub fn representative(&self) -> &StiefelPoint {
        &self.representative
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    /// `‖xxᵀ − yyᵀ‖_F`, evaluated as `√2 ‖y − x(xᵀy)‖_F` to avoid cancellation.
    pub fn projector_distance(&self, other: &GrassmannPoint) -> Result<f64> {
        self.representative.same_shape(&other.representative)?;
        Ok(projector_distance(
            self.representative.matrix(),
            other.representative.matrix(),
        ))
    }

    /// Same subspace (and, for oriented points, same orientation).
    pub fn same_as(&self, other: &GrassmannPoint) -> bool {
        if self.oriented != other.oriented {
            return false;
        }
        match self.projector_distance(other) {
            Ok(d) if d <= SUBSPACE_TOL => {
                !self.oriented
                    || same_orientation(self.representative.matrix(), other.representative.matrix())
            }
            _ => false,
        }
    }
}

impl PartialEq for GrassmannPoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

pub(crate) fn projector_distance(x: &Matrix, y: &Matrix) -> f64 {
    let resid = y - &x.matmul(&x.tr_mul(y));
    std::f64::consts::SQRT_2 * resid.norm_fro()
}

fn same_orientation(x: &Matrix, y: &Matrix) -> bool {
    polar_factor(&x.tr_mul(y))
        .map(|q| q.det() > 0.0)
        .unwrap_or(false)
}

fn check_pair(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<()> {
    x.representative.same_shape(&y.representative)?;
    if x.oriented != y.oriented {
        return Err(Error::OrientationMismatch);
    }
    Ok(())
}

/// Principal angles `θ_i = arccos σ_i(xᵀy)`, ascending.
pub fn principal_angles(x: &StiefelPoint, y: &StiefelPoint) -> Result<Vec<f64>> {
    x.same_shape(y)?;
    let s = svd_factor(&x.matrix().tr_mul(y.matrix()))?;
    Ok(s.sigma.iter().map(|v| v.clamp(0.0, 1.0).acos()).collect())
}

/// Geodesic distance on the unoriented Grassmannian from principal angles,
/// `sqrt(Σ θ_i²)`.
pub fn principal_angle_distance(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<f64> {
    if x.oriented || y.oriented {
        return Err(Error::OrientedUnsupported);
    }
    let angles = principal_angles(&x.representative, &y.representative)?;
    Ok(angles.iter().map(|t| t * t).sum::<f64>().sqrt())
}

/// The element `g` of the structure group minimizing `‖x − y·g‖_F`
/// (orthogonal Procrustes; Kabsch sign correction when `special`).
pub fn procrustes_alignment(x: &Matrix, y: &Matrix, special: bool) -> Result<Matrix> {
    let s = svd_factor(&y.tr_mul(x))?;
    let mut u = s.u;
    if special && u.matmul(&s.v.transpose()).det() < 0.0 {
        let last = u.cols() - 1;
        for i in 0..u.rows() {
            u.set(i, last, -u.get(i, last));
        }
    }
    Ok(u.matmul(&s.v.transpose()))
}

/// Horizontal initial velocity at `x`'s representative of a minimal geodesic
/// to `y`.
///
/// The representative of `y` is first aligned to `x` by Procrustes, the
/// Stiefel log to the aligned frame is projected onto the horizontal space,
/// and a final horizontal shot towards the subspace of `y` removes what the
/// projection left off. The result is accepted only if its endpoint lands in
/// the fiber of `y` (projector distance `≤ 1e-8`, matching orientation).
pub fn grassmann_log(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    cfg: &ShootingConfig,
) -> Result<TangentVector> {
    check_pair(x, y)?;
    let xr = &x.representative;
    let g = procrustes_alignment(xr.matrix(), y.representative.matrix(), x.oriented)?;
    let target = y.representative.rotate(&g)?;

    let first = match stiefel_log(xr, &target, cfg) {
        Ok(v) => v,
        Err(Error::NoConvergence { .. }) => project_tangent(xr, &(target.matrix() - xr.matrix()))?,
        Err(e) => return Err(e),
    };
    let guess = horizontal_project(&first);
    let shot = shoot_to_span(xr, &target, guess.matrix(), cfg)?;
    let h = horizontal_project(&shot.velocity);

    let end = stiefel_exp(&h, 1.0).0;
    let miss = projector_distance(end.matrix(), y.representative.matrix());
    let oriented_ok = !x.oriented || same_orientation(end.matrix(), y.representative.matrix());
    if miss > FIBER_TOL || !oriented_ok {
        return Err(Error::NoConvergence {
            best_residual: miss,
        });
    }
    Ok(h)
}

/// Point reached at time `t` along the horizontal geodesic with velocity `h`.
pub fn grassmann_exp(x: &GrassmannPoint, h: &TangentVector, t: f64) -> Result<GrassmannPoint> {
    x.representative.same_shape(h.base())?;
    let base = TangentVector::new_unchecked(x.representative.clone(), h.matrix().clone());
    let defect = x.representative.matrix().tr_mul(h.matrix()).norm_fro();
    if defect > HORIZONTAL_TOL {
        return Err(Error::NotHorizontal { defect });
    }
    Ok(GrassmannPoint::new(stiefel_exp(&base, t).0, x.oriented))
}

/// Length of the minimal geodesic, `‖grassmann_log(x, y)‖_F`.
pub fn grassmann_distance(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    cfg: &ShootingConfig,
) -> Result<f64> {
    grassmann_log(x, y, cfg).map(|h| h.norm())
}
