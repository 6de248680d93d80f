use super::{project_raw, StiefelPoint, TangentVector};
use crate::error::{Error, Result};
use crate::matcore::{matrix_exp, polar_factor, Matrix};

/// Frames whose orthonormality defect exceeds this are re-polished.
const POLISH_THRESHOLD: f64 = 5e-12;

/// Geodesic `γ(t)` with `γ(0) = x`, `γ̇(0) = v`, and its velocity.
///
/// With `A = xᵀv` and `S = vᵀv`,
///
/// ```text
/// [γ(t) e^{At}, γ̇(t) e^{At}] = [x, v] · exp(t [[A, −S], [I, A]])
/// ```
///
/// and both blocks are multiplied by `e^{−At}` afterwards. The geodesic
/// exists for all `t`.
pub fn stiefel_exp(v: &TangentVector, t: f64) -> (StiefelPoint, TangentVector) {
    let (g, gd) = exp_raw(v.base().matrix(), v.matrix(), t);
    let g = StiefelPoint::new_unchecked(g);
    (g.clone(), TangentVector::new_unchecked(g, gd))
}

pub(crate) fn exp_raw(x: &Matrix, v: &Matrix, t: f64) -> (Matrix, Matrix) {
    let p = x.cols();
    let a = x.tr_mul(v);
    let s = v.tr_mul(v);

    let mut block = Matrix::zeros(2 * p, 2 * p);
    block.set_block(0, 0, &a);
    block.set_block(0, p, &(-&s));
    block.set_block(p, 0, &Matrix::identity(p));
    block.set_block(p, p, &a);
    let e = matrix_exp(&block.scale(t));
    let undo = matrix_exp(&a.scale(-t));

    let moved = x.hstack(v).matmul(&e);
    let n = x.rows();
    let mut gamma = moved.block(0, 0, n, p).matmul(&undo);
    let mut gdot = moved.block(0, p, n, p).matmul(&undo);

    if gamma.orthonormality_defect() > POLISH_THRESHOLD {
        if let Ok(q) = polar_factor(&gamma) {
            gamma = q;
            gdot = project_raw(&gamma, &gdot);
        }
    }
    (gamma, gdot)
}

/// Points `exp_x(t_i v)` at `t_i = i/(k−1)`, `i = 0..k`.
pub fn geodesic_sample(v: &TangentVector, k: usize) -> Result<Vec<StiefelPoint>> {
    if k < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: k,
        });
    }
    Ok((0..k)
        .map(|i| {
            if i == 0 {
                v.base().clone()
            } else {
                stiefel_exp(v, i as f64 / (k - 1) as f64).0
            }
        })
        .collect())
}

/// Largest geodesic-equation defect `‖γ̈ + γ(γ̇ᵀγ̇)‖_F` over the interior
/// samples, with derivatives from central differences.
///
/// Samples must be uniformly spaced in `t` (relative tolerance `1e-9`).
pub fn geodesic_residual(samples: &[(f64, StiefelPoint)]) -> Result<f64> {
    if samples.len() < 5 {
        return Err(Error::TooFewSamples {
            required: 5,
            got: samples.len(),
        });
    }
    for w in samples.windows(2) {
        w[0].1.same_shape(&w[1].1)?;
    }
    let h = (samples[samples.len() - 1].0 - samples[0].0) / (samples.len() - 1) as f64;
    if h <= 0.0
        || samples
            .windows(2)
            .any(|w| ((w[1].0 - w[0].0) - h).abs() > 1e-9 * h.abs().max(1.0))
    {
        return Err(Error::NonUniformSpacing);
    }
    let mut worst: f64 = 0.0;
    for i in 1..samples.len() - 1 {
        let prev = samples[i - 1].1.matrix();
        let cur = samples[i].1.matrix();
        let next = samples[i + 1].1.matrix();
        let vel = (next - prev).scale(0.5 / h);
        let acc = (next - &cur.scale(2.0))
            .axpy(1.0, prev)
            .scale(1.0 / (h * h));
        let defect = acc + cur.matmul(&vel.tr_mul(&vel));
        worst = worst.max(defect.norm_fro());
    }
    Ok(worst)
}

/// Polygonal length `Σ ‖x_{i+1} − x_i‖_F` of a sampled path.
pub fn path_length(path: &[StiefelPoint]) -> f64 {
    path.windows(2)
        .map(|w| (w[1].matrix() - w[0].matrix()).norm_fro())
        .sum()
}
