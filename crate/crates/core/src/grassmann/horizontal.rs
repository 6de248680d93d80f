use crate::error::{Error, Result};
use crate::matcore::{polar_factor, Matrix};
use crate::stiefel::{StiefelPoint, TangentVector};

/// Largest allowed Frobenius gap between consecutive path samples.
const MAX_GAP: f64 = 0.5;

/// Samples `g(t_i)` of a path in the orthogonal group.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationPath {
    samples: Vec<Matrix>,
}

impl RotationPath {
    pub fn new(samples: Vec<Matrix>) -> Result<Self> {
        let path = RotationPath { samples };
        let drift = path.max_orthogonality_drift();
        if drift > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "rotation path leaves O(p): ||g^T g - I|| = {drift:e}"
            )));
        }
        Ok(path)
    }

    pub fn samples(&self) -> &[Matrix] {
        &self.samples
    }

    pub fn max_orthogonality_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|g| g.orthonormality_defect())
            .fold(0.0, f64::max)
    }
}

/// Removes the vertical part: `h = v − x(xᵀv)`.
pub fn horizontal_project(v: &TangentVector) -> TangentVector {
    let x = v.base().matrix();
    let h = v.matrix() - &x.matmul(&x.tr_mul(v.matrix()));
    TangentVector::new_unchecked(v.base().clone(), h)
}

/// First derivatives of a uniformly sampled matrix path on `[0, 1]`:
/// fourth-order stencils with at least five samples, second-order otherwise.
fn derivatives(path: &[&Matrix]) -> Vec<Matrix> {
    let k = path.len();
    let h = 1.0 / (k - 1) as f64;
    let comb = |terms: &[(f64, usize)], denom: f64| -> Matrix {
        let mut acc = Matrix::zeros(path[0].rows(), path[0].cols());
        for &(c, i) in terms {
            acc = acc.axpy(c, path[i]);
        }
        acc.scale(1.0 / denom)
    };
    (0..k)
        .map(|i| {
            if k >= 5 {
                let d = 12.0 * h;
                match i {
                    0 => comb(
                        &[(-25.0, 0), (48.0, 1), (-36.0, 2), (16.0, 3), (-3.0, 4)],
                        d,
                    ),
                    1 => comb(&[(-3.0, 0), (-10.0, 1), (18.0, 2), (-6.0, 3), (1.0, 4)], d),
                    _ if i == k - 2 => comb(
                        &[
                            (3.0, k - 1),
                            (10.0, k - 2),
                            (-18.0, k - 3),
                            (6.0, k - 4),
                            (-1.0, k - 5),
                        ],
                        d,
                    ),
                    _ if i == k - 1 => comb(
                        &[
                            (25.0, k - 1),
                            (-48.0, k - 2),
                            (36.0, k - 3),
                            (-16.0, k - 4),
                            (3.0, k - 5),
                        ],
                        d,
                    ),
                    _ => comb(
                        &[(-1.0, i + 2), (8.0, i + 1), (-8.0, i - 1), (1.0, i - 2)],
                        d,
                    ),
                }
            } else {
                let d = 2.0 * h;
                match i {
                    0 => comb(&[(-3.0, 0), (4.0, 1), (-1.0, 2)], d),
                    _ if i == k - 1 => comb(&[(3.0, k - 1), (-4.0, k - 2), (1.0, k - 3)], d),
                    _ => comb(&[(1.0, i + 1), (-1.0, i - 1)], d),
                }
            }
        })
        .collect()
}

/// Value halfway between samples `i` and `i + 1` by cubic interpolation
/// (linear when fewer than four samples exist).
fn midpoint(vals: &[Matrix], i: usize) -> Matrix {
    let k = vals.len();
    let w = |ws: [f64; 4], idx: [usize; 4]| -> Matrix {
        let mut acc = Matrix::zeros(vals[0].rows(), vals[0].cols());
        for (c, j) in ws.iter().zip(idx) {
            acc = acc.axpy(*c, &vals[j]);
        }
        acc.scale(1.0 / 16.0)
    };
    if k < 4 {
        return (&vals[i] + &vals[i + 1]).scale(0.5);
    }
    if i == 0 {
        w([5.0, 15.0, -5.0, 1.0], [0, 1, 2, 3])
    } else if i + 2 >= k {
        w([1.0, -5.0, 15.0, 5.0], [k - 4, k - 3, k - 2, k - 1])
    } else {
        w([-1.0, 9.0, 9.0, -1.0], [i - 1, i, i + 1, i + 2])
    }
}

/// Largest `‖yᵀẏ‖_F` along a sampled path, derivatives as in
/// [`horizontalize_path`]. Zero for horizontal paths up to discretization.
pub fn horizontality_defect(path: &[StiefelPoint]) -> f64 {
    if path.len() < 3 {
        return 0.0;
    }
    let mats: Vec<&Matrix> = path.iter().map(|p| p.matrix()).collect();
    derivatives(&mats)
        .iter()
        .zip(&mats)
        .map(|(d, y)| y.tr_mul(d).norm_fro())
        .fold(0.0, f64::max)
}

/// Right-multiplies a sampled path `x(t_i)` (uniform on `[0, 1]`) by a
/// rotation path `g(t_i)` so that `x·g` is horizontal.
///
/// `g` solves `ġ = −xᵀẋ·g`, `g(0) = I`, integrated by classical RK4 on the
/// sample grid with `ẋ` from central differences and the midpoint values
/// interpolated; each step is followed by a polar projection back onto
/// O(p).
pub fn horizontalize_path(path: &[StiefelPoint]) -> Result<(Vec<StiefelPoint>, RotationPath)> {
    if path.len() < 3 {
        return Err(Error::TooFewSamples {
            required: 3,
            got: path.len(),
        });
    }
    for (i, w) in path.windows(2).enumerate() {
        w[0].same_shape(&w[1])?;
        let gap = (w[1].matrix() - w[0].matrix()).norm_fro();
        if gap >= MAX_GAP {
            return Err(Error::ResolutionTooCoarse { index: i, gap });
        }
    }
    let k = path.len();
    let p = path[0].frame_dim();
    let h = 1.0 / (k - 1) as f64;
    let mats: Vec<&Matrix> = path.iter().map(|s| s.matrix()).collect();
    let omega: Vec<Matrix> = derivatives(&mats)
        .iter()
        .zip(&mats)
        .map(|(d, x)| x.tr_mul(d).skew())
        .collect();

    let rhs = |om: &Matrix, g: &Matrix| -> Matrix { om.matmul(g).scale(-1.0) };
    let mut gs = Vec::with_capacity(k);
    let mut g = Matrix::identity(p);
    gs.push(g.clone());
    for i in 0..k - 1 {
        let om_mid = midpoint(&omega, i);
        let k1 = rhs(&omega[i], &g);
        let k2 = rhs(&om_mid, &g.axpy(0.5 * h, &k1));
        let k3 = rhs(&om_mid, &g.axpy(0.5 * h, &k2));
        let k4 = rhs(&omega[i + 1], &g.axpy(h, &k3));
        let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
        g = polar_factor(&g.axpy(h / 6.0, &incr))?;
        gs.push(g.clone());
    }

    let out = path
        .iter()
        .zip(&gs)
        .map(|(x, g)| StiefelPoint::polish(&x.matrix().matmul(g)))
        .collect::<Result<Vec<_>>>()?;
    Ok((out, RotationPath { samples: gs }))
}
