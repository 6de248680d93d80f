use super::{svd_factor, Matrix};
use crate::error::{Error, Result};

/// Smallest admissible singular-value ratio for [`orthonormalize`].
const RANK_RATIO: f64 = 1e-12;

struct Reflector {
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

impl Reflector {
    /// Reflector zeroing `x[1..]`; `None` when `x` is already zero.
    fn new(start: usize, x: &[f64]) -> (Option<Reflector>, f64) {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return (None, 0.0);
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|t| t * t).sum();
        if vv == 0.0 {
            return (None, x[0]);
        }
        (
            Some(Reflector {
                start,
                v,
                beta: 2.0 / vv,
            }),
            alpha,
        )
    }

    /// Applies `I − β v vᵀ` to columns `c0..` of `a`.
    fn apply(&self, a: &mut Matrix, c0: usize) {
        for j in c0..a.cols() {
            let mut s = 0.0;
            for (i, vi) in self.v.iter().enumerate() {
                s += vi * a.get(self.start + i, j);
            }
            s *= self.beta;
            if s == 0.0 {
                continue;
            }
            for (i, vi) in self.v.iter().enumerate() {
                *a.at_mut(self.start + i, j) -= s * vi;
            }
        }
    }
}

/// Thin Householder QR with `diag(R) ≥ 0`, no pivoting.
fn householder_qr(m: &Matrix) -> (Matrix, Matrix) {
    let (n, p) = m.shape();
    let mut a = m.clone();
    let mut refl = Vec::with_capacity(p);
    for k in 0..p.min(n) {
        let x: Vec<f64> = (k..n).map(|i| a.get(i, k)).collect();
        let (h, _) = Reflector::new(k, &x);
        if let Some(h) = &h {
            h.apply(&mut a, k);
        }
        refl.push(h);
    }
    let mut r = Matrix::from_fn(p, p, |i, j| if i <= j && i < n { a.get(i, j) } else { 0.0 });
    let mut q = Matrix::eye(n, p);
    for h in refl.iter().rev().flatten() {
        h.apply(&mut q, 0);
    }
    fix_signs(&mut q, &mut r);
    (q, r)
}

fn fix_signs(q: &mut Matrix, r: &mut Matrix) {
    for k in 0..r.rows().min(q.cols()) {
        if r.get(k, k) < 0.0 {
            for j in 0..r.cols() {
                *r.at_mut(k, j) = -r.get(k, j);
            }
            for i in 0..q.rows() {
                *q.at_mut(i, k) = -q.get(i, k);
            }
        }
    }
}

/// Orthonormal basis of the column span of `m`, computed by Householder QR
/// with the sign convention `diag(R) ≥ 0`.
///
/// Fails with [`Error::RankDeficient`] when the smallest singular value is not
/// larger than `1e-12` times the largest.
pub fn orthonormalize(m: &Matrix) -> Result<Matrix> {
    let sigma = svd_factor(m)?.sigma;
    let smax = sigma.first().copied().unwrap_or(0.0);
    let smin = if m.rows() < m.cols() {
        0.0
    } else {
        sigma.last().copied().unwrap_or(0.0)
    };
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if ratio <= RANK_RATIO {
        return Err(Error::RankDeficient { ratio });
    }
    Ok(householder_qr(m).0)
}

/// Result of a column-pivoted (rank-revealing) QR factorization.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// Orthonormal basis of the numerically independent part, `n × rank`.
    pub q: Matrix,
    /// Column order chosen by the pivoting; the first `rank` entries are the
    /// independent columns.
    pub perm: Vec<usize>,
    pub rank: usize,
    /// `|R_kk|` for each accepted pivot.
    pub pivots: Vec<f64>,
}

/// Householder QR with greedy column pivoting. Stops once the largest
/// remaining column norm drops to `tol` or below.
pub fn pivoted_qr(m: &Matrix, tol: f64) -> PivotedQr {
    let (n, p) = m.shape();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut refl = Vec::new();
    let mut pivots = Vec::new();
    for k in 0..p.min(n) {
        let norms: Vec<f64> = (k..p)
            .map(|j| (k..n).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt())
            .collect();
        let (best, &best_norm) = norms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        if best_norm <= tol {
            break;
        }
        let jb = k + best;
        if jb != k {
            perm.swap(k, jb);
            for i in 0..n {
                let t = a.get(i, k);
                a.set(i, k, a.get(i, jb));
                a.set(i, jb, t);
            }
        }
        let x: Vec<f64> = (k..n).map(|i| a.get(i, k)).collect();
        let (h, alpha) = Reflector::new(k, &x);
        if let Some(h) = &h {
            h.apply(&mut a, k);
        }
        refl.push(h);
        pivots.push(alpha.abs());
    }
    let rank = refl.len();
    let mut q = Matrix::eye(n, rank.max(1));
    for h in refl.iter().rev().flatten() {
        h.apply(&mut q, 0);
    }
    if rank > 0 {
        let mut r = Matrix::from_fn(rank, rank, |i, j| if i <= j { a.get(i, j) } else { 0.0 });
        fix_signs(&mut q, &mut r);
    }
    let q = if rank == 0 { Matrix::zeros(n, 1) } else { q };
    PivotedQr {
        q,
        perm,
        rank,
        pivots,
    }
}

/// `k` orthonormal vectors orthogonal to the columns of `basis`.
///
/// `basis` must have orthonormal columns. Candidates are the standard basis
/// vectors in index order; the first whose residual after projection has
/// norm at least 1/2 is taken. At most `4(r + k)/3 + 1` candidates are ever
/// inspected for an `r`-column basis, so the cost is linear in the ambient
/// dimension and the result is deterministic.
pub fn complement_basis(basis: &Matrix, k: usize) -> Result<Matrix> {
    let n = basis.rows();
    if basis.cols() + k > n {
        return Err(Error::AmbientTooSmall {
            ambient: n,
            required: basis.cols() + k,
        });
    }
    let mut cols: Vec<Vec<f64>> = (0..basis.cols()).map(|j| basis.column(j)).collect();
    let mut out = Matrix::zeros(n, k.max(1));
    let mut next = 0;
    for j in 0..k {
        let mut best: Option<(f64, Vec<f64>)> = None;
        while next < n {
            let (nr, r) = residual_of_unit(n, next, &cols);
            next += 1;
            if best.as_ref().is_none_or(|(b, _)| nr > *b) {
                best = Some((nr, r));
            }
            if nr >= 0.5 {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| *b < 0.5) {
            // nearly full basis: take the best of all candidates
            best = (0..n)
                .map(|e| residual_of_unit(n, e, &cols))
                .max_by(|a, b| a.0.total_cmp(&b.0));
        }
        let (nr, mut r) = best.expect("ambient dimension is positive");
        r.iter_mut().for_each(|v| *v /= nr);
        out.set_column(j, &r);
        cols.push(r);
    }
    Ok(out)
}

/// Residual of the unit vector `e_index` after projecting out `cols` twice.
fn residual_of_unit(n: usize, index: usize, cols: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let mut r = vec![0.0; n];
    r[index] = 1.0;
    for _ in 0..2 {
        for c in cols {
            let d: f64 = c.iter().zip(&r).map(|(a, b)| a * b).sum();
            for (ri, ci) in r.iter_mut().zip(c) {
                *ri -= d * ci;
            }
        }
    }
    (r.iter().map(|v| v * v).sum::<f64>().sqrt(), r)
}
