use super::{solve, Matrix};

// [13/13] Padé coefficients and the 1-norm bound below which no scaling is
// needed (Higham 2005).
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA_13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant.
///
/// # Panics
/// If `m` is not square.
pub fn matrix_exp(m: &Matrix) -> Matrix {
    assert!(m.is_square(), "matrix_exp needs a square matrix");
    let n = m.rows();
    let norm = m.norm_one();
    if norm == 0.0 {
        return Matrix::identity(n);
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale(0.5f64.powi(s));
    let id = Matrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> Matrix {
        a6.scale(c6).axpy(c4, &a4).axpy(c2, &a2).axpy(c0, &id)
    };
    let u_inner =
        a6.matmul(&lin(B13[13], B13[11], B13[9], 0.0)) + lin(B13[7], B13[5], B13[3], B13[1]);
    let u = a.matmul(&u_inner);
    let v = a6.matmul(&lin(B13[12], B13[10], B13[8], 0.0)) + lin(B13[6], B13[4], B13[2], B13[0]);

    let p = &v + &u;
    let q = &v - &u;
    // q is well conditioned after scaling (‖a‖₁ ≤ θ₁₃), so the solve cannot fail
    let mut r = solve(&q, &p).expect("Padé denominator is nonsingular after scaling");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
