use super::{StiefelPoint, STIEFEL_TOL};
use crate::error::{Error, Result};
use crate::matcore::{complement_basis, pivoted_qr, Matrix};

/// Numerical rank tolerance for `[x | y]`.
pub const RANK_TOL: f64 = 1e-10;

/// A pair of frames expressed in an orthonormal basis of the span of their
/// columns.
#[derive(Debug, Clone)]
pub struct SubspaceReduction {
    /// `n × m` with orthonormal columns; the first `p` columns are `x` itself.
    pub basis: Matrix,
    pub reduced_x: StiefelPoint,
    pub reduced_y: StiefelPoint,
}

impl SubspaceReduction {
    /// Dimension `m` of the span, `p ≤ m ≤ 2p`.
    pub fn effective_dim(&self) -> usize {
        self.basis.cols()
    }

    /// Maps reduced coordinates (`m × k`) back to the ambient space.
    pub fn lift(&self, m: &Matrix) -> Matrix {
        self.basis.matmul(m)
    }

    /// Extends the basis with orthonormal complement vectors until it has
    /// `min(target, n)` columns, keeping the existing columns first.
    pub fn padded(&self, target: usize) -> Result<SubspaceReduction> {
        let n = self.basis.rows();
        let m = self.effective_dim();
        let target = target.min(n);
        if target <= m {
            return Ok(self.clone());
        }
        let extra = complement_basis(&self.basis, target - m)?;
        let basis = self.basis.hstack(&extra);
        let pad = |f: &StiefelPoint| {
            let mut z = Matrix::zeros(target, f.frame_dim());
            z.set_block(0, 0, f.matrix());
            StiefelPoint::new_unchecked(z)
        };
        Ok(SubspaceReduction {
            reduced_x: pad(&self.reduced_x),
            reduced_y: pad(&self.reduced_y),
            basis,
        })
    }
}

/// Orthonormal basis of `span(cols x, cols y)` and both frames in its
/// coordinates.
///
/// The basis starts with the columns of `x`; the remaining columns come from
/// a pivoted QR of the part of `y` orthogonal to `x`, truncated at numerical
/// rank `1e-10`.
pub fn reduce_to_span(x: &StiefelPoint, y: &StiefelPoint) -> Result<SubspaceReduction> {
    x.same_shape(y)?;
    let xm = x.matrix();
    let resid = remove_span(xm, y.matrix());
    let qr = pivoted_qr(&resid, RANK_TOL);
    let basis = if qr.rank == 0 {
        xm.clone()
    } else {
        // second pass keeps the new directions orthogonal to x at round-off level
        let extra = remove_span(xm, &qr.q);
        xm.hstack(&StiefelPoint::polish(&extra)?.into_matrix())
    };
    let reduced_x = StiefelPoint::polish(&basis.tr_mul(xm))?;
    let reduced_y = StiefelPoint::polish(&basis.tr_mul(y.matrix()))?;
    Ok(SubspaceReduction {
        basis,
        reduced_x,
        reduced_y,
    })
}

/// `m − b(bᵀm)`, applied twice.
fn remove_span(b: &Matrix, m: &Matrix) -> Matrix {
    let once = m - &b.matmul(&b.tr_mul(m));
    &once - &b.matmul(&b.tr_mul(&once))
}

/// Replaces `y` by a nearby frame whose columns are independent of those of
/// `x`.
///
/// Columns of `y` are scanned in order and kept when they add a new
/// direction to `span(x, kept columns)`; each of the `k` remaining columns
/// `y_i` becomes `cos(eps)·y_i + sin(eps)·r_i`, with `r_1..r_k` orthonormal
/// and orthogonal to `span(x, y)`. Returns `y` unchanged when `[x | y]`
/// already has rank `2p`.
pub fn perturb_independent(x: &StiefelPoint, y: &StiefelPoint, eps: f64) -> Result<StiefelPoint> {
    x.same_shape(y)?;
    let (n, p) = x.matrix().shape();
    if n < 2 * p {
        return Err(Error::AmbientTooSmall {
            ambient: n,
            required: 2 * p,
        });
    }
    if !(eps > 0.0 && eps < std::f64::consts::FRAC_PI_4) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in (0, pi/4), got {eps}"
        )));
    }

    let mut span = x.matrix().clone();
    let mut dependent = Vec::new();
    for j in 0..p {
        let col = Matrix::column_vector(&y.matrix().column(j));
        let r = remove_span(&span, &col);
        let nr = r.norm_fro();
        if nr > RANK_TOL {
            span = span.hstack(&r.scale(1.0 / nr));
        } else {
            dependent.push(j);
        }
    }
    if dependent.is_empty() {
        return Ok(y.clone());
    }
    let normals = complement_basis(&span, dependent.len())?;
    let (c, s) = (eps.cos(), eps.sin());
    let mut out = y.matrix().clone();
    for (idx, &j) in dependent.iter().enumerate() {
        let yj = y.matrix().column(j);
        let rj = normals.column(idx);
        let col: Vec<f64> = yj.iter().zip(&rj).map(|(a, b)| c * a + s * b).collect();
        out.set_column(j, &col);
    }
    StiefelPoint::new(out)
}

/// The isometric embedding `ℝⁿ → ℝᴺ` padding with zeros.
pub fn zero_pad_embedding(n: usize, big_n: usize) -> Matrix {
    Matrix::eye(big_n, n)
}

/// Pushes a frame forward along an isometric embedding `ℝⁿ → ℝᴺ` given as
/// an `N × n` matrix with orthonormal columns.
pub fn embed_frame(x: &StiefelPoint, embedding: &Matrix) -> Result<StiefelPoint> {
    if embedding.cols() != x.ambient_dim() || embedding.rows() < embedding.cols() {
        return Err(Error::ShapeMismatch(format!(
            "embedding {:?} cannot act on ambient dimension {}",
            embedding.shape(),
            x.ambient_dim()
        )));
    }
    let defect = embedding.orthonormality_defect();
    if defect > STIEFEL_TOL {
        return Err(Error::NotAnIsometry { defect });
    }
    Ok(StiefelPoint::new_unchecked(embedding.matmul(x.matrix())))
}
