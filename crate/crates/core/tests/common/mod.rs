//! Reference computations written independently of the library code paths.
#![allow(dead_code, clippy::needless_range_loop)]

use stgeo::Matrix;

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

pub fn from_rows(r: &[Vec<f64>]) -> Matrix {
    Matrix::from_fn(r.len(), r[0].len(), |i, j| r[i][j])
}

/// Modified Gram–Schmidt applied twice, column by column.
pub fn gram_schmidt(m: &Matrix) -> Matrix {
    let (n, p) = m.shape();
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| m.column(j)).collect();
    for j in 0..p {
        for _ in 0..2 {
            for k in 0..j {
                let d: f64 = (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
                for i in 0..n {
                    cols[j][i] -= d * cols[k][i];
                }
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Matrix::from_fn(n, p, |i, j| cols[j][i])
}

/// `‖z − QQᵀz‖_F` for a matrix `q` with orthonormal columns.
pub fn projector_residual(q: &Matrix, z: &Matrix) -> f64 {
    (z - &q.matmul(&q.tr_mul(z))).norm_fro()
}

/// `‖PQ − PR‖_F` for the orthogonal projectors onto two column spans.
pub fn projector_gap(q: &Matrix, r: &Matrix) -> f64 {
    (&q.matmul(&q.transpose()) - &r.matmul(&r.transpose())).norm_fro()
}

fn plain_matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            for j in 0..m {
                c[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    c
}

/// `Σ_{k<60} m^k / k!` with Kahan-compensated accumulation per entry.
pub fn taylor_exp(m: &Matrix) -> Matrix {
    let a = to_rows(m);
    let n = a.len();
    let mut term: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut sum = term.clone();
    let mut comp = vec![vec![0.0; n]; n];
    for k in 1..60 {
        term = plain_matmul(&term, &a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let y = term[i][j] - comp[i][j];
                let t = sum[i][j] + y;
                comp[i][j] = (t - sum[i][j]) - y;
                sum[i][j] = t;
            }
        }
    }
    from_rows(&sum)
}

/// Eigenvalues of a symmetric matrix by the classical Jacobi method (largest
/// off-diagonal entry first), descending.
pub fn jacobi_eigenvalues(s: &Matrix) -> Vec<f64> {
    let mut a = to_rows(s);
    let n = a.len();
    let scale = s.norm_fro();
    for _ in 0..10_000 {
        let (mut p, mut q, mut big) = (0, 1, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                if a[i][j].abs() > big {
                    big = a[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if big <= 1e-18 * scale {
            break;
        }
        let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let t = if theta == 0.0 { 1.0 } else { t };
        let c = 1.0 / (t * t + 1.0).sqrt();
        let sn = t * c;
        for k in 0..n {
            let (akp, akq) = (a[k][p], a[k][q]);
            a[k][p] = c * akp - sn * akq;
            a[k][q] = sn * akp + c * akq;
        }
        for k in 0..n {
            let (apk, aqk) = (a[p][k], a[q][k]);
            a[p][k] = c * apk - sn * aqk;
            a[q][k] = sn * apk + c * aqk;
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// Integrates `γ̈ = −γ(γ̇ᵀγ̇)` from `(x, v)` to time `t` with classical RK4.
pub fn rk4_geodesic(x: &Matrix, v: &Matrix, t: f64, h: f64) -> (Matrix, Matrix) {
    let steps = (t / h).round().max(1.0) as usize;
    let h = t / steps as f64;
    let f = |g: &Matrix, gd: &Matrix| -> (Matrix, Matrix) {
        (gd.clone(), g.matmul(&gd.tr_mul(gd)).scale(-1.0))
    };
    let (mut g, mut gd) = (x.clone(), v.clone());
    for _ in 0..steps {
        let (a1, b1) = f(&g, &gd);
        let (a2, b2) = f(&g.axpy(0.5 * h, &a1), &gd.axpy(0.5 * h, &b1));
        let (a3, b3) = f(&g.axpy(0.5 * h, &a2), &gd.axpy(0.5 * h, &b2));
        let (a4, b4) = f(&g.axpy(h, &a3), &gd.axpy(h, &b3));
        g = g.axpy(h / 6.0, &a1.axpy(2.0, &a2).axpy(2.0, &a3).axpy(1.0, &a4));
        gd = gd.axpy(h / 6.0, &b1.axpy(2.0, &b2).axpy(2.0, &b3).axpy(1.0, &b4));
    }
    (g, gd)
}

/// Curve points as an `N × 2` matrix, for error measurements.
pub fn points_matrix(points: &[[f64; 2]]) -> Matrix {
    Matrix::from_fn(points.len(), 2, |i, j| points[i][j])
}

/// Largest pointwise gap after removing the mean offset.
pub fn max_gap_after_translation(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let n = a.len() as f64;
    let mut off = [0.0; 2];
    for (p, q) in a.iter().zip(b) {
        off[0] += (p[0] - q[0]) / n;
        off[1] += (p[1] - q[1]) / n;
    }
    a.iter()
        .zip(b)
        .map(|(p, q)| (p[0] - q[0] - off[0]).hypot(p[1] - q[1] - off[1]))
        .fold(0.0, f64::max)
}
