//! Polynomials over prime fields and their factorization.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::poly::QPoly;

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn invmod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    powmod(a, p - 2, p)
}

pub fn reduce_big(a: &BigInt, p: u64) -> u64 {
    a.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// Polynomial over F_p in ascending degree with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_i64(p: u64, c: &[i64]) -> Self {
        let pi = p as i64;
        Self::new(p, c.iter().map(|&x| x.rem_euclid(pi) as u64).collect())
    }

    pub fn from_bigints(p: u64, c: &[BigInt]) -> Self {
        Self::new(p, c.iter().map(|x| reduce_big(x, p)).collect())
    }

    /// Reduction of an integral rational polynomial; fails on p-adic denominators.
    pub fn from_qpoly(p: u64, f: &QPoly) -> Result<Self> {
        let pb = BigInt::from(p);
        let mut out = Vec::with_capacity(f.coeffs().len());
        for c in f.coeffs() {
            if (c.denom() % &pb).is_zero() {
                return Err(Error::InvalidInput(format!("coefficient {c} is not {p}-integral")));
            }
            let d = reduce_big(c.denom(), p);
            out.push(mulmod(reduce_big(c.numer(), p), invmod(d, p), p));
        }
        Ok(Self::new(p, out))
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = invmod(self.lead(), self.p);
        Self::new(self.p, self.c.iter().map(|&x| mulmod(x, inv, self.p)).collect())
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.c.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.p, (0..n).map(|i| (self.coeff(i) + o.coeff(i)) % self.p).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.p, (0..n).map(|i| (self.coeff(i) + self.p - o.coeff(i)) % self.p).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, p)) % p;
            }
        }
        Self::new(p, out)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.c.iter().map(|&x| mulmod(x, k, self.p)).collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let mut r = self.c.clone();
        let dd = d.deg();
        if r.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let inv = invmod(d.lead(), p);
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let k = mulmod(r[i + dd], inv, p);
            if k != 0 {
                for (j, &dc) in d.c.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - mulmod(k, dc, p)) % p;
                }
            }
            q[i] = k;
        }
        r.truncate(dd);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(p, self.c.iter().enumerate().skip(1).map(|(i, &x)| mulmod(x, i as u64 % p, p)).collect())
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &c| (mulmod(acc, x, self.p) + c) % self.p)
    }

    /// self^e mod m, with e given as a big integer.
    pub fn pow_mod(&self, e: &BigInt, m: &Self) -> Self {
        let mut result = Self::one(self.p).rem(m);
        let mut base = self.rem(m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
        }
        result
    }

    /// The polynomial g with g(x)^p = self; requires self' = 0.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        // Frobenius is the identity on F_p, so coefficients carry over unchanged.
        Self::new(self.p, self.c.iter().step_by(p).copied().collect())
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (mod {})", self.p);
        }
        let mut parts = Vec::new();
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            parts.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        write!(f, "{} (mod {})", parts.join(" + "), self.p)
    }
}

fn squarefree_parts(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let fd = f.derivative();
    let mut c = f.gcd(&fd);
    let mut w = f.div_rem(&c).0.monic();
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0.monic();
        if fac.deg() > 0 {
            out.push((fac, i));
        }
        w = y;
        c = c.div_rem(&w).0.monic();
        i += 1;
    }
    if c.deg() > 0 {
        let root = c.pth_root();
        for (g, j) in squarefree_parts(&root) {
            out.push((g, j * p as usize));
        }
    }
    out
}

fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let pe = BigInt::from(p);
    let x = FpPoly::x(p);
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut d = 1;
    while rest.deg() >= 2 * d {
        h = h.pow_mod(&pe, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.deg() > 0 {
            out.push((g.clone(), d));
            rest = rest.div_rem(&g).0.monic();
            h = h.rem(&rest);
        }
        d += 1;
    }
    if rest.deg() > 0 {
        let dd = rest.deg();
        out.push((rest, dd));
    }
    out
}

fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let n = f.deg();
    if n == d {
        out.push(f.monic());
        return;
    }
    let p = f.p;
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            // absolute trace from F_{2^d} down to F_2
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = (BigInt::from(p).pow(d as u32) - 1) / 2;
            a.pow_mod(&e, f).sub(&FpPoly::one(p))
        };
        let g = b.gcd(f);
        if g.deg() > 0 && g.deg() < n {
            let other = f.div_rem(&g).0.monic();
            equal_degree(&g, d, rng, out);
            equal_degree(&other, d, rng, out);
            return;
        }
    }
}

/// Factorization of a monic polynomial over F_p into monic irreducibles with
/// multiplicities, sorted by (degree, coefficients).
pub fn factor_mod_p(f: &FpPoly) -> Result<Vec<(FpPoly, usize)>> {
    if f.is_zero() || !f.is_monic() {
        return Err(Error::InvalidInput(format!("factor_mod_p needs a monic polynomial, got {f:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ f.p);
    let mut out = Vec::new();
    for (sf, mult) in squarefree_parts(f) {
        for (block, d) in distinct_degree(&sf) {
            let mut pieces = Vec::new();
            equal_degree(&block, d, &mut rng, &mut pieces);
            out.extend(pieces.into_iter().map(|g| (g, mult)));
        }
    }
    out.sort_by(|a, b| (a.0.deg(), &a.0.c, a.1).cmp(&(b.0.deg(), &b.0.c, b.1)));
    Ok(out)
}

/// Irreducibility by exhaustive search for monic divisors of degree ≤ deg/2.
/// Only meant for tiny fields and degrees; used to cross-check [`factor_mod_p`].
pub fn is_irreducible_exhaustive(f: &FpPoly) -> bool {
    let n = f.deg();
    if n == 0 {
        return false;
    }
    let p = f.p;
    for d in 1..=n / 2 {
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let mut c = Vec::with_capacity(d + 1);
            let mut k = idx;
            for _ in 0..d {
                c.push((k % p as usize) as u64);
                k /= p as usize;
            }
            c.push(1);
            let g = FpPoly::new(p, c);
            if f.rem(&g).is_zero() {
                return false;
            }
        }
    }
    true
}
