//! Gaussian elimination over Q and over F_p.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::fp::{invmod, mulmod};

pub type QMat = Vec<Vec<BigRational>>;

/// Inverse of a square rational matrix; `None` if singular.
pub fn q_inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let k = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &k * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Row vector times matrix.
pub fn q_vec_mul(v: &[BigRational], m: &QMat) -> Vec<BigRational> {
    let cols = m.first().map_or(0, Vec::len);
    let mut out = vec![BigRational::zero(); cols];
    for (vi, row) in v.iter().zip(m) {
        if vi.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += vi * x;
        }
    }
    out
}

pub fn q_mat_mul(a: &QMat, b: &QMat) -> QMat {
    a.iter().map(|row| q_vec_mul(row, b)).collect()
}

pub fn q_det(m: &QMat) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if piv != c {
            a.swap(c, piv);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            if !a[r][c].is_zero() {
                let k = &a[r][c] / &a[c][c];
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &k * y;
                }
            }
        }
    }
    det
}

/// Reduced row echelon form mod p; returns (rref rows, pivot columns).
pub fn fp_rref(rows: &[Vec<u64>], p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let inv = invmod(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let k = a[i][c];
                for j in 0..cols {
                    let sub = mulmod(k, a[r][j], p);
                    a[i][j] = (a[i][j] + p - sub) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

pub fn fp_rank(rows: &[Vec<u64>], p: u64) -> usize {
    fp_rref(rows, p).1.len()
}

/// Basis of the right kernel {x : A x = 0} mod p, A given by rows of length `cols`.
pub fn fp_kernel(rows: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let (r, pivots) = fp_rref(rows, p);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = (p - row[f] % p) % p;
            }
            v
        })
        .collect()
}

/// Basis of the left kernel {y : y A = 0} mod p.
pub fn fp_left_kernel(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let cols = rows.first().map_or(0, Vec::len);
    let t: Vec<Vec<u64>> = (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    fp_kernel(&t, rows.len(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::rat;

    #[test]
    fn rational_inverse() {
        let m = vec![vec![rat(2), rat(1)], vec![rat(1), rat(1)]];
        let inv = q_inverse(&m).unwrap();
        let id = q_mat_mul(&m, &inv);
        assert_eq!(id, vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]);
        assert_eq!(q_det(&m), rat(1));
        assert!(q_inverse(&vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]]).is_none());
    }

    #[test]
    fn kernels_mod_p() {
        let a = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let k = fp_kernel(&a, 3, 2);
        assert_eq!(k, vec![vec![1, 1, 1]]);
        assert_eq!(fp_rank(&a, 2), 2);
        let lk = fp_left_kernel(&vec![vec![1, 0], vec![1, 0], vec![0, 1]], 3);
        assert_eq!(lk, vec![vec![2, 1, 0]]);
    }
}
