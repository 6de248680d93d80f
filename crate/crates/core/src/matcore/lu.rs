use super::Matrix;
use crate::error::{Error, Result};

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(Error::ShapeMismatch(format!(
            "solve: {:?} \\ {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| lu.get(i, k).abs().total_cmp(&lu.get(j, k).abs()))
            .unwrap();
        let d = lu.get(piv, k);
        if d.abs() <= f64::EPSILON * scale * n as f64 || d == 0.0 {
            return Err(Error::Singular);
        }
        lu.swap_rows(piv, k);
        x.swap_rows(piv, k);
        for i in k + 1..n {
            let f = lu.get(i, k) / d;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                *lu.at_mut(i, j) -= f * lu.get(k, j);
            }
            for j in 0..m {
                *x.at_mut(i, j) -= f * x.get(k, j);
            }
        }
    }
    for k in (0..n).rev() {
        let d = lu.get(k, k);
        for j in 0..m {
            let mut s = x.get(k, j);
            for c in k + 1..n {
                s -= lu.get(k, c) * x.get(c, j);
            }
            x.set(k, j, s / d);
        }
    }
    Ok(x)
}
