//! Dense symmetric-definite eigensolver generic over the working precision.
//!
//! `H v = W S v` is reduced by congruence with the Cholesky factor of `S`
//! (`C = L⁻¹ H L⁻ᵀ`) and `C` is diagonalised with the cyclic Jacobi method,
//! which keeps full relative accuracy and needs nothing beyond `+ - * / sqrt`.

use nalgebra::DMatrix;

use crate::real::Real;

/// Lower Cholesky factor of a symmetric positive definite matrix.
///
/// Fails with the index of the first pivot `d_j` with `d_j <= floor * S_jj`.
pub fn cholesky_with_floor<T: Real>(s: &DMatrix<T>, floor: f64) -> Result<DMatrix<T>, usize> {
    let n = s.nrows();
    let tol = T::of(floor);
    let mut l = DMatrix::from_element(n, n, T::zero());
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > s[(j, j)] * tol) {
            return Err(j);
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}

/// Lower Cholesky factor, rejecting pivots that are not clearly positive at
/// working precision.
pub fn cholesky<T: Real>(s: &DMatrix<T>) -> Result<DMatrix<T>, usize> {
    cholesky_with_floor(s, 64.0 * T::UNIT_ROUNDOFF)
}

/// Solves `L X = B` in place for lower-triangular `L`.
pub fn forward_substitute<T: Real>(l: &DMatrix<T>, b: &mut DMatrix<T>) {
    let n = l.nrows();
    for c in 0..b.ncols() {
        for i in 0..n {
            let mut v = b[(i, c)];
            for k in 0..i {
                v -= l[(i, k)] * b[(k, c)];
            }
            b[(i, c)] = v / l[(i, i)];
        }
    }
}

/// Solves `Lᵀ X = B` in place for lower-triangular `L`.
pub fn back_substitute_transposed<T: Real>(l: &DMatrix<T>, b: &mut DMatrix<T>) {
    let n = l.nrows();
    for c in 0..b.ncols() {
        for i in (0..n).rev() {
            let mut v = b[(i, c)];
            for k in i + 1..n {
                v -= l[(k, i)] * b[(k, c)];
            }
            b[(i, c)] = v / l[(i, i)];
        }
    }
}

/// Eigen-decomposition of a real symmetric matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns.
pub fn symmetric_eigen<T: Real>(a: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::from_element(n, n, T::zero());
    for i in 0..n {
        v[(i, i)] = T::one();
    }
    let eps = T::of(T::UNIT_ROUNDOFF);
    let half = T::of(0.5);

    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            total += a[(i, i)] * a[(i, i)];
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        total += off + off;
        if off.sqrt() <= eps * total.sqrt() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) * half / apq;
                let t = {
                    let mag = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Solution of the generalized problem `H v = W S v`.
pub struct GeneralizedEigen<T> {
    pub values: Vec<T>,
    /// S-orthonormal eigenvectors as columns (`vᵀ S v = 1`).
    pub vectors: DMatrix<T>,
}

/// Solves the symmetric-definite pencil `(H, S)`; `Err` carries the first
/// Cholesky pivot of `S` below `floor` (relative to the diagonal).
pub fn generalized_symmetric_eigen<T: Real>(
    h: &DMatrix<T>,
    s: &DMatrix<T>,
    floor: f64,
) -> Result<GeneralizedEigen<T>, usize> {
    let l = cholesky_with_floor(s, floor)?;
    let mut x = h.clone();
    forward_substitute(&l, &mut x);
    let mut c = x.transpose();
    forward_substitute(&l, &mut c);
    let n = c.nrows();
    let half = T::of(0.5);
    for i in 0..n {
        for j in i + 1..n {
            let m = (c[(i, j)] + c[(j, i)]) * half;
            c[(i, j)] = m;
            c[(j, i)] = m;
        }
    }
    let (values, mut vectors) = symmetric_eigen(&c);
    back_substitute_transposed(&l, &mut vectors);
    Ok(GeneralizedEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{Dd, Real};

    fn hilbert(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)
    }

    #[test]
    fn cholesky_reconstructs() {
        let s = hilbert(5);
        let l = cholesky(&s).unwrap();
        let back = &l * l.transpose();
        assert!((back - &s).abs().max() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(cholesky(&s), Err(1));
    }

    #[test]
    fn jacobi_on_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a);
        assert!((vals[0] - 1.0).abs() < 1e-15 && (vals[1] - 3.0).abs() < 1e-15);
        let r = &a * vecs.column(0) - vecs.column(0) * vals[0];
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn generalized_diagonal_pencil() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![6.0, 2.0, 9.0]));
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0, 3.0]));
        let ge = generalized_symmetric_eigen(&h, &s, 64.0 * f64::UNIT_ROUNDOFF).unwrap();
        for (got, want) in ge.values.iter().zip([2.0, 3.0, 3.0]) {
            assert!((got - want).abs() < 1e-15, "{got}");
        }
        let g = ge.vectors.transpose() * &s * &ge.vectors;
        assert!((g - DMatrix::identity(3, 3)).abs().max() < 1e-14);
    }

    #[test]
    fn double_double_handles_hilbert_12() {
        // cond(H_12) ~ 1.7e16: hopeless in f64, routine in double-double.
        let n = 12;
        let s = DMatrix::from_fn(n, n, |i, j| Dd::from(1.0) / Dd::from((i + j + 1) as f64));
        let h = DMatrix::from_fn(n, n, |i, j| if i == j { Dd::from(1.0) } else { Dd::from(0.0) });
        let ge = generalized_symmetric_eigen(&h, &s, 64.0 * Dd::UNIT_ROUNDOFF).unwrap();
        // reciprocal of the smallest eigenvalue of H_12 (1.0479463979622267e-16)
        let largest = ge.values.last().unwrap().hi();
        assert!((largest * 1.0479463979622267e-16 - 1.0).abs() < 1e-12, "{largest:e}");
        for c in 0..n {
            let v = ge.vectors.column(c);
            let mut q = Dd::from(0.0);
            for i in 0..n {
                for j in 0..n {
                    q += v[i] * s[(i, j)] * v[j];
                }
            }
            assert!((q - 1.0).hi().abs() < 1e-12, "column {c}: {q:?}");
        }
    }
}
