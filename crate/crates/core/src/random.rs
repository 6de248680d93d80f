//! Seeded sampling of matrices, frames and tangent vectors.
//!
//! Every random draw in the crate goes through [`stream_rng`]: a ChaCha8
//! generator keyed by a 64-bit seed with a separate stream per consumer, so
//! identical seeds give identical bits regardless of evaluation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{orthonormalize, Matrix};
use crate::stiefel::{project_tangent, StiefelPoint, TangentVector};

/// Counter-based generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Matrix with independent standard normal entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Uniformly distributed point of St(p, ℝⁿ) (QR of a Gaussian matrix).
pub fn random_stiefel<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize) -> StiefelPoint {
    loop {
        if let Ok(q) = orthonormalize(&gaussian_matrix(rng, n, p)) {
            return StiefelPoint::new(q).expect("QR output is orthonormal");
        }
    }
}

/// Random orthogonal `p × p` matrix; `det = +1` when `special` is set.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, p: usize, special: bool) -> Matrix {
    let mut q = random_stiefel(rng, p, p).into_matrix();
    if special && q.det() < 0.0 {
        for i in 0..p {
            q.set(i, 0, -q.get(i, 0));
        }
    }
    q
}

/// Random skew-symmetric matrix with Frobenius norm `norm`.
pub fn random_skew<R: Rng + ?Sized>(rng: &mut R, p: usize, norm: f64) -> Matrix {
    let s = gaussian_matrix(rng, p, p).skew();
    let f = s.norm_fro();
    if f == 0.0 {
        return s;
    }
    s.scale(norm / f)
}

/// Random tangent vector at `x` with Frobenius norm `norm`.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, x: &StiefelPoint, norm: f64) -> TangentVector {
    let m = gaussian_matrix(rng, x.ambient_dim(), x.frame_dim());
    let v = project_tangent(x, &m).expect("shapes agree");
    let f = v.norm();
    TangentVector::new_unchecked(x.clone(), v.matrix().scale(norm / f))
}
