//! Small dense helpers that nalgebra does not provide in the form needed:
//! allocation-free complex inversion, complex determinants, Householder
//! completions and Pfaffians.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::C64;

/// Inverts the row-major `d × d` matrix `a` into `inv` by Gauss–Jordan
/// elimination with partial pivoting. `a` is destroyed. Returns `false` if a
/// pivot vanishes.
pub fn invert_in_place(a: &mut [C64], inv: &mut [C64], d: usize) -> bool {
    for v in inv.iter_mut() {
        *v = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        inv[i * d + i] = C64::new(1.0, 0.0);
    }
    for col in 0..d {
        let mut piv = col;
        let mut best = a[col * d + col].norm_sqr();
        for row in col + 1..d {
            let v = a[row * d + col].norm_sqr();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return false;
        }
        if piv != col {
            for k in 0..d {
                a.swap(piv * d + k, col * d + k);
                inv.swap(piv * d + k, col * d + k);
            }
        }
        let p = C64::new(1.0, 0.0) / a[col * d + col];
        for k in 0..d {
            a[col * d + k] *= p;
            inv[col * d + k] *= p;
        }
        for row in 0..d {
            if row == col {
                continue;
            }
            let f = a[row * d + col];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..d {
                let ak = a[col * d + k];
                let ik = inv[col * d + k];
                a[row * d + k] -= f * ak;
                inv[row * d + k] -= f * ik;
            }
        }
    }
    true
}

/// Determinant of a row-major complex matrix by LU with partial pivoting.
pub fn det_c(a: &[C64], d: usize) -> C64 {
    let mut m = a.to_vec();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..d {
        let mut piv = col;
        let mut best = m[col * d + col].norm_sqr();
        for row in col + 1..d {
            let v = m[row * d + col].norm_sqr();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != col {
            for k in 0..d {
                m.swap(piv * d + k, col * d + k);
            }
            det = -det;
        }
        let p = m[col * d + col];
        det *= p;
        for row in col + 1..d {
            let f = m[row * d + col] / p;
            for k in col..d {
                let v = m[col * d + k];
                m[row * d + k] -= f * v;
            }
        }
    }
    det
}

/// Pfaffian of a row-major complex skew-symmetric matrix (Parlett–Reid style
/// elimination with pivoting).
pub fn pfaffian(a: &[C64], d: usize) -> C64 {
    if d % 2 == 1 {
        return C64::new(0.0, 0.0);
    }
    let mut m = a.to_vec();
    let mut pf = C64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < d {
        // Pivot: largest entry in column k below row k.
        let mut piv = k + 1;
        let mut best = m[(k + 1) * d + k].norm_sqr();
        for i in k + 2..d {
            let v = m[i * d + k].norm_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != k + 1 {
            // Symmetric swap of rows/cols k+1 and piv.
            for j in 0..d {
                m.swap((k + 1) * d + j, piv * d + j);
            }
            for i in 0..d {
                m.swap(i * d + k + 1, i * d + piv);
            }
            pf = -pf;
        }
        let akk1 = m[k * d + k + 1];
        pf *= akk1;
        // Eliminate with the congruence that zeroes row/col k beyond k+1.
        for i in k + 2..d {
            let f = m[k * d + i] / akk1;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            // col_i -= f·col_{k+1}; row_i -= f·row_{k+1}.
            for r in 0..d {
                let v = m[r * d + k + 1];
                m[r * d + i] -= f * v;
            }
            for c in 0..d {
                let v = m[(k + 1) * d + c];
                m[i * d + c] -= f * v;
            }
        }
        k += 2;
    }
    pf
}

/// Orthogonal matrix whose first column is the unit vector `u`: the
/// Householder reflection exchanging `e₁` and `u` (identity when `u = e₁`).
pub fn householder_e1(u: &[f64]) -> DMatrix<f64> {
    let r = u.len();
    let mut w: Vec<f64> = u.to_vec();
    w[0] -= 1.0;
    let wn2: f64 = w.iter().map(|v| v * v).sum();
    let mut h = DMatrix::<f64>::identity(r, r);
    if wn2 < 1e-30 {
        return h;
    }
    for i in 0..r {
        for j in 0..r {
            h[(i, j)] -= 2.0 * w[i] * w[j] / wn2;
        }
    }
    h
}

/// Row-major copy of a real matrix as complex numbers.
pub fn to_complex_row_major(m: &DMatrix<f64>) -> Vec<C64> {
    let d = m.nrows();
    let mut out = vec![C64::new(0.0, 0.0); d * m.ncols()];
    for i in 0..d {
        for j in 0..m.ncols() {
            out[i * m.ncols() + j] = C64::new(m[(i, j)], 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_roundtrip() {
        let a = [
            c(2.0, 1.0),
            c(0.5, 0.0),
            c(0.0, 0.0),
            c(-1.0, 0.3),
            c(3.0, 0.0),
            c(1.0, -1.0),
            c(0.2, 0.0),
            c(0.0, 2.0),
            c(1.0, 0.0),
        ];
        let mut w = a;
        let mut inv = [c(0.0, 0.0); 9];
        assert!(invert_in_place(&mut w, &mut inv, 3));
        for i in 0..3 {
            for j in 0..3 {
                let mut s = c(0.0, 0.0);
                for k in 0..3 {
                    s += a[i * 3 + k] * inv[k * 3 + j];
                }
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - c(e, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let vals = [0.3, -1.2, 0.7, 2.0, 0.1, -0.4];
        let mut a = vec![c(0.0, 0.0); 16];
        let mut idx = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                a[i * 4 + j] = c(vals[idx], 0.1 * idx as f64);
                a[j * 4 + i] = -a[i * 4 + j];
                idx += 1;
            }
        }
        let pf = pfaffian(&a, 4);
        // Closed form for 4×4: a12 a34 − a13 a24 + a14 a23.
        let closed = a[1] * a[11] - a[2] * a[7] + a[3] * a[6];
        assert!((pf - closed).norm() < 1e-14);
        assert!((pf * pf - det_c(&a, 4)).norm() < 1e-13);
    }

    #[test]
    fn householder_first_column() {
        let u = [0.6, 0.0, -0.8];
        let h = householder_e1(&u);
        for i in 0..3 {
            assert!((h[(i, 0)] - u[i]).abs() < 1e-15);
        }
        assert!((h.transpose() * &h - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);
    }
}
