//! Small dense complex linear algebra helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Relative singular-value cutoff for the pseudoinverse.
pub const PINV_RCOND: f64 = 1e-12;

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below
/// `rcond · σ_max` are treated as zero; an all-zero matrix maps to zero.
pub fn pseudo_inverse(m: &CMatrix, rcond: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    let mut pinv = CMatrix::zeros(cols, rows);
    if rows == 0 || cols == 0 {
        return pinv;
    }
    let svd = m.clone().svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("SVD was asked for both factors"),
    };
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rcond * sigma_max;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        // V Σ⁺ Uᴴ, one rank-1 term at a time
        let v = v_t.row(i).adjoint();
        let uh = u.column(i).adjoint();
        pinv += (v * uh) * Complex64::new(1.0 / s, 0.0);
    }
    pinv
}

/// `Σ_ij conj(a_i) · M_ij · a_j`
pub fn quadratic_form(m: &CMatrix, a: &[Complex64]) -> Complex64 {
    let n = a.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += m[(i, j)] * a[j];
        }
        acc += a[i].conj() * row;
    }
    acc
}

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
