//! Dense integer matrices with Hermite and Smith normal forms.
//!
//! The Hermite form used throughout the crate is the row-style echelon form
//! `H = U * M`: upper triangular, positive pivots, and every entry above a
//! pivot reduced into `[0, pivot)`. Ideal bases and relation lattices are
//! compared through this form byte for byte, so the convention must not
//! drift.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        IntMatrix { rows: r, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += vi * &self[(i, j)];
            }
        }
        out
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(r, j)]);
            self[(r, j)] = v;
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// Replaces rows (a, b) by (s*a + t*b, u*a + v*b).
    fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = s * &x + t * &y;
            self[(b, j)] = u * &x + v * &y;
        }
    }

    fn combine_cols(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            self[(i, a)] = s * &x + t * &y;
            self[(i, b)] = u * &x + v * &y;
        }
    }

    /// Drops all-zero rows.
    pub fn nonzero_rows(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = (0..self.rows)
            .filter(|&i| self.row(i).iter().any(|x| !x.is_zero()))
            .map(|i| self.row_vec(i))
            .collect();
        IntMatrix::from_big_rows(rows, self.cols)
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Extended gcd returning (g, s, t) with s*a + t*b = g >= 0.
pub fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn hnf_impl(m: &IntMatrix, track: bool) -> (IntMatrix, Option<IntMatrix>) {
    let mut h = m.clone();
    let mut u = track.then(|| IntMatrix::identity(m.rows));
    let mut r = 0;
    for c in 0..h.cols {
        if r == h.rows {
            break;
        }
        // Fold the column below r into row r with unimodular 2x2 steps.
        for k in r + 1..h.rows {
            if h[(k, c)].is_zero() {
                continue;
            }
            if h[(r, c)].is_zero() {
                h.swap_rows(r, k);
                if let Some(u) = u.as_mut() {
                    u.swap_rows(r, k);
                }
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(k, c)].clone();
            let (g, s, t) = xgcd(&a, &b);
            let ua = -(&b / &g);
            let va = &a / &g;
            h.combine_rows(r, k, &s, &t, &ua, &va);
            if let Some(u) = u.as_mut() {
                u.combine_rows(r, k, &s, &t, &ua, &va);
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            if let Some(u) = u.as_mut() {
                u.negate_row(r);
            }
        }
        let p = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&p);
            if !q.is_zero() {
                let nq = -q;
                h.add_row_multiple(i, r, &nq);
                if let Some(u) = u.as_mut() {
                    u.add_row_multiple(i, r, &nq);
                }
            }
        }
        r += 1;
    }
    (h, u)
}

/// Row-style Hermite normal form with its unimodular transform: `H = U * M`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (h, u) = hnf_impl(m, true);
    (h, u.expect("transform tracked"))
}

/// Hermite normal form without the transform; cheaper for tall generator matrices.
pub fn hnf(m: &IntMatrix) -> IntMatrix {
    hnf_impl(m, false).0
}

/// Hermite basis of the row lattice: the HNF with zero rows dropped.
pub fn hnf_basis(m: &IntMatrix) -> IntMatrix {
    hnf(m).nonzero_rows()
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal entries `d_1 | d_2 | ...`, length `min(rows, cols)`; zeros last.
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

/// Unimodular 2×2 step (s, t; u, v) sending (p, q) to (g, 0). When p | q it is
/// a plain subtraction, so the pivot never moves and elimination terminates.
fn elimination(p: &BigInt, q: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if (q % p).is_zero() {
        return (BigInt::one(), BigInt::zero(), -(q / p), BigInt::one());
    }
    let (g, s, t) = xgcd(p, q);
    (s, t, -(q / &g), p / &g)
}

/// Smith normal form `D = U * M * V` with unimodular transforms.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                if a[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if a[(bi, bj)].abs() <= a[(i, j)].abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..a.rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let (s, tt, ua, va) = elimination(&a[(t, t)], &a[(i, t)]);
                a.combine_rows(t, i, &s, &tt, &ua, &va);
                u.combine_rows(t, i, &s, &tt, &ua, &va);
            }
            for j in t + 1..a.cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let (s, tt, ua, va) = elimination(&a[(t, t)], &a[(t, j)]);
                a.combine_cols(t, j, &s, &tt, &ua, &va);
                v.combine_cols(t, j, &s, &tt, &ua, &va);
                dirty = true;
            }
            if dirty && (t + 1..a.rows).any(|i| !a[(i, t)].is_zero()) {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot into row t.
            let p = a[(t, t)].clone();
            let bad = (t + 1..a.rows)
                .flat_map(|i| (t + 1..a.cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[(i, j)] % &p).is_zero());
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let diagonal = (0..n).map(|i| a[(i, i)].clone()).collect();
    SmithForm { diagonal, u, v }
}

/// Invariant factors of `Z^cols / rowspace(M)`, dropping the trivial ones.
/// A zero factor stands for a free `Z` summand.
pub fn abelian_invariants(relations: &IntMatrix) -> Vec<BigInt> {
    let snf = smith_normal_form(relations);
    let mut out: Vec<BigInt> = snf.diagonal.into_iter().filter(|d| !d.is_one()).collect();
    for _ in relations.rows.min(relations.cols)..relations.cols {
        out.push(BigInt::zero());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_terminates_on_unit_pivots() {
        // Wide relation matrices with ±1 entries used to cycle forever.
        let m = IntMatrix::from_rows(&[vec![1, 0, 0, -1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal, vec![BigInt::one(); 3]);
        assert_eq!(snf.u.mul(&m).mul(&snf.v).row(0)[0], BigInt::one());
        assert_eq!(abelian_invariants(&m), vec![BigInt::zero()]);
    }

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn is_hnf(h: &IntMatrix) -> bool {
        let mut last_pivot: Option<usize> = None;
        for i in 0..h.rows() {
            let Some(c) = (0..h.cols()).find(|&j| !h[(i, j)].is_zero()) else {
                // zero rows only at the bottom
                return (i..h.rows()).all(|k| h.row(k).iter().all(Zero::is_zero));
            };
            if last_pivot.is_some_and(|p| c <= p) || !h[(i, c)].is_positive() {
                return false;
            }
            for k in 0..i {
                if h[(k, c)].is_negative() || h[(k, c)] >= h[(i, c)] {
                    return false;
                }
            }
            last_pivot = Some(c);
        }
        true
    }

    #[test]
    fn hnf_examples() {
        let (h, _) = hermite_normal_form(&m(&[vec![2, 0], vec![0, 2]]));
        assert_eq!(h, m(&[vec![2, 0], vec![0, 2]]));
        let (h, _) = hermite_normal_form(&m(&[vec![1, 1], vec![0, 1]]));
        assert_eq!(h, IntMatrix::identity(2));
        let src = m(&[vec![4, 6], vec![2, 2]]);
        let (h, u) = hermite_normal_form(&src);
        assert_eq!(u.mul(&src), h);
        assert_eq!(h.det().abs(), BigInt::from(4));
        assert!(is_hnf(&h));
        assert_eq!(u.det().abs(), BigInt::one());
    }

    #[test]
    fn hnf_zero_and_rank_deficient() {
        let (h, _) = hermite_normal_form(&IntMatrix::zeros(2, 3));
        assert!(h.is_zero());
        let src = m(&[vec![2, 4, 6], vec![1, 2, 3], vec![0, 0, 5]]);
        let (h, u) = hermite_normal_form(&src);
        assert_eq!(u.mul(&src), h);
        assert!(is_hnf(&h));
        assert_eq!(hnf_basis(&src).rows(), 2);
    }

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.diagonal, vec![BigInt::one(); 3]);
        let src = m(&[vec![2, 0], vec![0, 4]]);
        assert_eq!(smith_normal_form(&src).diagonal, vec![BigInt::from(2), BigInt::from(4)]);
        let src = m(&[vec![2, 4], vec![4, 2]]);
        let s = smith_normal_form(&src);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6)]);
        let d = s.u.mul(&src).mul(&s.v);
        assert_eq!(d, m(&[vec![2, 0], vec![0, 6]]));
    }

    #[test]
    fn snf_rectangular_and_invariants() {
        // (Z/8)* presented as Z^2 / <(2,0),(0,2)> once generators -1 and 5 are fixed
        let rel = m(&[vec![2, 0], vec![0, 2], vec![4, 2]]);
        assert_eq!(abelian_invariants(&rel), vec![BigInt::from(2), BigInt::from(2)]);
        let rel = m(&[vec![6, 4]]);
        assert_eq!(abelian_invariants(&rel), vec![BigInt::from(2), BigInt::zero()]);
    }

    #[test]
    fn bareiss_det() {
        assert_eq!(m(&[vec![4, 6], vec![2, 2]]).det(), BigInt::from(-4));
        assert_eq!(m(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]).det(), BigInt::from(-2));
        assert_eq!(m(&[vec![1, 2], vec![2, 4]]).det(), BigInt::zero());
    }
}
