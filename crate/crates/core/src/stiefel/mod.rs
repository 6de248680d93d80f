//! The Stiefel manifold St(p, ℝⁿ) of orthonormal p-frames with the embedded
//! metric `⟨u, w⟩ = tr(uᵀw)`.
//!
//! Two-point problems never need the full ambient space: a geodesic stays in
//! the span of its initial position and velocity, so [`reduce_to_span`] maps
//! a pair of frames into at most `2p` dimensions, where the log map is solved
//! by shooting ([`stiefel_log`]) and then lifted back.

mod exp;
mod reduce;
mod shooting;

pub use exp::{geodesic_residual, geodesic_sample, path_length, stiefel_exp};
pub use reduce::{
    embed_frame, perturb_independent, reduce_to_span, zero_pad_embedding, SubspaceReduction,
};
pub(crate) use shooting::shoot_to_span;
pub use shooting::{
    stiefel_distance, stiefel_log, stiefel_log_detailed, LogOutcome, ShootingConfig,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{FrameJson, TangentJson};
use crate::matcore::{orthonormalize, polar_factor, symmetric_eigen, Matrix};

/// Tolerance on `‖xᵀx − I‖_F` for a valid frame.
pub const STIEFEL_TOL: f64 = 1e-10;
/// Tolerance on `‖xᵀv + vᵀx‖_F` for a valid tangent vector.
pub const TANGENT_TOL: f64 = 1e-10;

/// An orthonormal p-frame in ℝⁿ, stored as an `n × p` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameJson", into = "FrameJson")]
pub struct StiefelPoint {
    x: Matrix,
}

impl StiefelPoint {
    pub fn new(x: Matrix) -> Result<Self> {
        if x.cols() > x.rows() {
            return Err(Error::ShapeMismatch(format!(
                "frame dimension {} exceeds ambient dimension {}",
                x.cols(),
                x.rows()
            )));
        }
        let defect = x.orthonormality_defect();
        if defect > STIEFEL_TOL {
            return Err(Error::NotStiefel { defect });
        }
        Ok(StiefelPoint { x })
    }

    /// Frame spanning the same columns as `m`, via QR.
    pub fn from_span(m: &Matrix) -> Result<Self> {
        StiefelPoint::new(orthonormalize(m)?)
    }

    /// Nearest frame to `m` in Frobenius norm (polar projection).
    pub fn polish(m: &Matrix) -> Result<Self> {
        Ok(StiefelPoint {
            x: polar_factor(m)?,
        })
    }

    pub(crate) fn new_unchecked(x: Matrix) -> Self {
        StiefelPoint { x }
    }

    /// The frame `[e₁ … e_p]`.
    pub fn standard(n: usize, p: usize) -> Self {
        assert!(p <= n);
        StiefelPoint {
            x: Matrix::eye(n, p),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.x.rows()
    }

    pub fn frame_dim(&self) -> usize {
        self.x.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.x
    }

    pub fn into_matrix(self) -> Matrix {
        self.x
    }

    pub fn defect(&self) -> f64 {
        self.x.orthonormality_defect()
    }

    /// Right action `x · g` of a `p × p` orthogonal matrix.
    pub fn rotate(&self, g: &Matrix) -> Result<Self> {
        if g.shape() != (self.frame_dim(), self.frame_dim()) {
            return Err(Error::ShapeMismatch(format!(
                "right action needs a {0}x{0} matrix, got {1:?}",
                self.frame_dim(),
                g.shape()
            )));
        }
        StiefelPoint::new(self.x.matmul(g))
    }

    /// Errors with [`Error::ShapeMismatch`] unless both frames are `n × p`.
    pub fn same_shape(&self, other: &StiefelPoint) -> Result<()> {
        if self.x.shape() != other.x.shape() {
            return Err(Error::ShapeMismatch(format!(
                "frames have shapes {:?} and {:?}",
                self.x.shape(),
                other.x.shape()
            )));
        }
        Ok(())
    }
}

/// A tangent vector `v` at a frame `x`: `xᵀv` is skew-symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TangentJson", into = "TangentJson")]
pub struct TangentVector {
    base: StiefelPoint,
    v: Matrix,
}

impl TangentVector {
    pub fn new(base: StiefelPoint, v: Matrix) -> Result<Self> {
        if v.shape() != base.x.shape() {
            return Err(Error::ShapeMismatch(format!(
                "tangent {:?} at base {:?}",
                v.shape(),
                base.x.shape()
            )));
        }
        let defect = tangent_defect(&base.x, &v);
        if defect > TANGENT_TOL {
            return Err(Error::NotTangent { defect });
        }
        Ok(TangentVector { base, v })
    }

    pub fn zero(base: StiefelPoint) -> Self {
        let (n, p) = base.x.shape();
        TangentVector {
            base,
            v: Matrix::zeros(n, p),
        }
    }

    pub(crate) fn new_unchecked(base: StiefelPoint, v: Matrix) -> Self {
        TangentVector { base, v }
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn matrix(&self) -> &Matrix {
        &self.v
    }

    pub fn norm(&self) -> f64 {
        self.v.norm_fro()
    }

    pub fn scale(&self, s: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            v: self.v.scale(s),
        }
    }

    pub fn defect(&self) -> f64 {
        tangent_defect(&self.base.x, &self.v)
    }
}

fn tangent_defect(x: &Matrix, v: &Matrix) -> f64 {
    let a = x.tr_mul(v);
    (&a + &a.transpose()).norm_fro()
}

/// Orthogonal projection of `m` onto the tangent space at `x`:
/// `m − x · sym(xᵀm)`.
pub fn project_tangent(x: &StiefelPoint, m: &Matrix) -> Result<TangentVector> {
    if m.shape() != x.x.shape() {
        return Err(Error::ShapeMismatch(format!(
            "cannot project {:?} onto the tangent space of a {:?} frame",
            m.shape(),
            x.x.shape()
        )));
    }
    Ok(TangentVector {
        base: x.clone(),
        v: project_raw(&x.x, m),
    })
}

pub(crate) fn project_raw(x: &Matrix, m: &Matrix) -> Matrix {
    m - &x.matmul(&x.tr_mul(m).sym())
}

/// The `p × p` coefficients of the closed-form geodesic: `A = xᵀv`
/// (skew-symmetric) and `S = vᵀv` (symmetric positive semidefinite).
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCoeffs {
    pub a: Matrix,
    pub s: Matrix,
}

impl GeodesicCoeffs {
    pub fn from_tangent(v: &TangentVector) -> Self {
        GeodesicCoeffs {
            a: v.base.x.tr_mul(&v.v),
            s: v.v.tr_mul(&v.v),
        }
    }

    /// Checks skewness of `A`, symmetry of `S` and `S ⪰ 0`, all at `1e-10`.
    pub fn validate(&self) -> Result<()> {
        let skew = (&self.a + &self.a.transpose()).norm_fro();
        if skew > TANGENT_TOL {
            return Err(Error::NotTangent { defect: skew });
        }
        let asym = (&self.s - &self.s.transpose()).norm_fro();
        if asym > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "S is not symmetric ({asym:e})"
            )));
        }
        let (vals, _) = symmetric_eigen(&self.s)?;
        if let Some(&min) = vals.last() {
            if min < -1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "S has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(())
    }
}
