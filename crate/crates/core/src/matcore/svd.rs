use super::{complement_basis, Matrix};
use crate::error::{Error, Result};

/// Thin singular value decomposition `m = u · diag(sigma) · vᵀ`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: Matrix,
    /// Non-increasing, non-negative.
    pub sigma: Vec<f64>,
    /// `cols × k` with orthonormal columns.
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let us = Matrix::from_fn(self.u.rows(), self.u.cols(), |i, j| {
            self.u.get(i, j) * self.sigma[j]
        });
        us.matmul(&self.v.transpose())
    }
}

/// SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Sweeps are capped at `100 · max(rows, cols)`; exceeding the cap yields
/// [`Error::ConvergenceFailure`].
pub fn svd_factor(m: &Matrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix("svd of non-finite matrix".into()));
    }
    if m.rows() < m.cols() {
        let t = svd_tall(&m.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    svd_tall(m)
}

fn svd_tall(m: &Matrix) -> Result<Svd> {
    let (n, p) = m.shape();
    let cap = 100 * n.max(p);
    // work in column-major scratch for contiguous column access
    let mut a: Vec<Vec<f64>> = (0..p).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let mut converged = p < 2;
    for _ in 0..cap {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let (alpha, beta, gamma) = a[i]
                    .iter()
                    .zip(&a[j])
                    .fold((0.0, 0.0, 0.0), |(s1, s2, s3), (x, y)| {
                        (s1 + x * x, s2 + y * y, s3 + x * y)
                    });
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { sweeps: cap });
    }

    let norms: Vec<f64> = a
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let smax = norms[order[0]];
    let tiny = smax * f64::EPSILON * n as f64;
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let nonzero = sigma.iter().take_while(|&&s| s > tiny && s > 0.0).count();

    let mut u = Matrix::zeros(n, p);
    let mut vm = Matrix::zeros(p, p);
    for (k, &j) in order.iter().enumerate() {
        if k < nonzero {
            let col: Vec<f64> = a[j].iter().map(|x| x / norms[j]).collect();
            u.set_column(k, &col);
        }
        vm.set_column(k, &v[j]);
    }
    if nonzero < p {
        let known = if nonzero == 0 {
            Matrix::zeros(n, 0)
        } else {
            u.block(0, 0, n, nonzero)
        };
        let fill = complement_from(&known, p - nonzero)?;
        u.set_block(0, nonzero, &fill);
    }
    Ok(Svd { u, sigma, v: vm })
}

fn complement_from(known: &Matrix, k: usize) -> Result<Matrix> {
    if known.cols() == 0 {
        return Ok(Matrix::eye(known.rows(), k));
    }
    complement_basis(known, k)
}

fn rotate(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(j);
    for (x, y) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

/// Orthogonal polar factor `u vᵀ` of a tall matrix: the closest matrix with
/// orthonormal columns in Frobenius norm.
pub fn polar_factor(m: &Matrix) -> Result<Matrix> {
    let s = svd_factor(m)?;
    Ok(s.u.matmul(&s.v.transpose()))
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in non-increasing order, eigenvectors as columns.
pub fn symmetric_eigen(s: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !s.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "symmetric_eigen needs a square matrix, got {:?}",
            s.shape()
        )));
    }
    let n = s.rows();
    let mut a = s.sym();
    let mut q = Matrix::identity(n);
    let cap = 100 * n.max(1);
    let scale = a.norm_fro();
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale || off == 0.0 {
            break;
        }
        if sweeps >= cap {
            return Err(Error::ConvergenceFailure { sweeps: cap });
        }
        sweeps += 1;
        for p in 0..n {
            for r in p + 1..n {
                let apr = a.get(p, r);
                if apr == 0.0 {
                    continue;
                }
                let theta = (a.get(r, r) - a.get(p, p)) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akr = a.get(k, r);
                    a.set(k, p, c * akp - sn * akr);
                    a.set(k, r, sn * akp + c * akr);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let ark = a.get(r, k);
                    a.set(p, k, c * apk - sn * ark);
                    a.set(r, k, sn * apk + c * ark);
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - sn * qkr);
                    q.set(k, r, sn * qkp + c * qkr);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a.get(y, y).total_cmp(&a.get(x, x)));
    let vals = order.iter().map(|&i| a.get(i, i)).collect();
    Ok((vals, q.select_columns(&order)))
}
