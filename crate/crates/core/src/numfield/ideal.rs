//! Integral ideals as HNF lattices on the integral basis, and prime splitting.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::fp::{factor_mod_p, reduce_big, FpPoly};
use crate::exactalg::linalg::{fp_kernel, fp_rank};
use crate::exactalg::matrix::{hnf, IntMatrix};
use crate::exactalg::poly::int_rat;

use super::field::{FieldElement, NumberField};

/// Nonzero integral ideal; `basis` is the canonical HNF (rows are Z-generators
/// in integral-basis coordinates).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    basis: IntMatrix,
    norm: BigInt,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal(N={}, {:?})", self.norm, self.basis.to_rows())
    }
}

impl Serialize for Ideal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.basis.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        (self.norm.to_string(), rows).serialize(s)
    }
}

impl Ideal {
    fn from_rows(rows: Vec<Vec<BigInt>>, n: usize) -> Result<Self> {
        let h = hnf(&IntMatrix::from_big_rows(rows, n)).nonzero_rows();
        if h.rows() != n {
            return Err(Error::InvalidInput("zero ideal".into()));
        }
        let norm = (0..n).fold(BigInt::one(), |acc, i| acc * &h[(i, i)]);
        Ok(Ideal { basis: h, norm })
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn norm(&self) -> &BigInt {
        &self.norm
    }

    pub fn is_unit(&self) -> bool {
        self.norm.is_one()
    }

    /// Canonical representative of v modulo the ideal: coordinate i ends in [0, h_ii).
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let n = v.len();
        let mut out = v.to_vec();
        for i in 0..n {
            let q = out[i].div_floor(&self.basis[(i, i)]);
            if !q.is_zero() {
                for j in i..n {
                    out[j] -= &q * &self.basis[(i, j)];
                }
            }
        }
        out
    }

    pub fn contains_int(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains(&self, a: &FieldElement) -> bool {
        a.int_coords().is_some_and(|v| self.contains_int(&v))
    }

    /// I ⊆ self.
    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        (0..other.basis.rows()).all(|i| self.contains_int(other.basis.row(i)))
    }

    /// Coordinates whose pivot exceeds one: these index O/I as a mixed-radix space.
    pub fn residue_radices(&self) -> Vec<(usize, BigInt)> {
        (0..self.basis.rows())
            .filter(|&i| !self.basis[(i, i)].is_one())
            .map(|i| (i, self.basis[(i, i)].clone()))
            .collect()
    }

    /// The smallest positive integer in the ideal.
    pub fn min_integer(&self, k: &NumberField) -> BigInt {
        // Z ∩ I is generated by the order of 1 in O/I.
        let one = k.one().int_coords().expect("1 is integral");
        let mut m = BigInt::one();
        for (_, d) in self.residue_radices() {
            m *= d;
        }
        let mut best = m.clone();
        for (p, _) in crate::exactalg::intfactor::factorize(&m) {
            while (&best % &p).is_zero() {
                let cand = &best / &p;
                let v: Vec<BigInt> = one.iter().map(|x| x * &cand).collect();
                if self.contains_int(&v) {
                    best = cand;
                } else {
                    break;
                }
            }
        }
        best
    }
}

/// A prime ideal above p with ramification index e and residue degree f.
/// `gen` is a second generator, P = (p, gen); `beta` lies in pP⁻¹ but not
/// in pO, so x ∈ P exactly when x·beta ∈ pO.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub ideal: Ideal,
    pub gen: FieldElement,
    #[serde(skip)]
    beta: Vec<BigInt>,
}

impl fmt::Debug for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prime(p={}, e={}, f={}, N={})", self.p, self.e, self.f, self.ideal.norm)
    }
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        BigInt::from(self.p).pow(self.f)
    }
}

impl NumberField {
    pub fn unit_ideal(&self) -> Ideal {
        Ideal { basis: IntMatrix::identity(self.degree()), norm: BigInt::one() }
    }

    /// Ideal generated by integral elements.
    pub fn ideal_from_gens(&self, gens: &[FieldElement]) -> Result<Ideal> {
        let n = self.degree();
        let mut rows = Vec::with_capacity(gens.len() * n);
        for g in gens {
            let gi = g
                .int_coords()
                .ok_or_else(|| Error::InvalidInput(format!("generator {g:?} is not integral")))?;
            for i in 0..n {
                let mut e = vec![BigInt::zero(); n];
                e[i] = BigInt::one();
                rows.push(self.mul_int(&gi, &e));
            }
        }
        Ideal::from_rows(rows, n)
    }

    pub fn principal_ideal(&self, a: &FieldElement) -> Result<Ideal> {
        self.ideal_from_gens(std::slice::from_ref(a))
    }

    pub fn int_ideal(&self, m: &BigInt) -> Ideal {
        self.principal_ideal(&self.from_rational(int_rat(m))).expect("nonzero integer")
    }

    pub fn ideal_mul(&self, a: &Ideal, b: &Ideal) -> Ideal {
        let n = self.degree();
        let mut rows = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                rows.push(self.mul_int(a.basis.row(i), b.basis.row(j)));
            }
        }
        // products of two full-rank lattices stay full rank
        Ideal::from_rows(rows, n).expect("nonzero product")
    }

    pub fn ideal_pow(&self, a: &Ideal, e: u32) -> Ideal {
        let mut out = self.unit_ideal();
        for _ in 0..e {
            out = self.ideal_mul(&out, a);
        }
        out
    }

    pub fn ideal_add(&self, a: &Ideal, b: &Ideal) -> Ideal {
        let n = self.degree();
        let rows: Vec<Vec<BigInt>> = a.basis.to_rows().into_iter().chain(b.basis.to_rows()).collect();
        Ideal::from_rows(rows, n).expect("sum of nonzero ideals")
    }

    /// Intersection via the sum-of-duals trick is overkill here; for coprime
    /// ideals the product equals the intersection, which is all callers need.
    pub fn ideal_lcm_coprime(&self, a: &Ideal, b: &Ideal) -> Ideal {
        self.ideal_mul(a, b)
    }

    pub fn ideal_add_elem(&self, a: &Ideal, x: &FieldElement) -> Result<Ideal> {
        let g = self.principal_ideal(x)?;
        Ok(self.ideal_add(a, &g))
    }

    /// Valuation of a nonzero element at a prime (negative for denominators).
    pub fn valuation(&self, p: &PrimeIdeal, a: &FieldElement) -> Result<i64> {
        if a.is_zero() {
            return Err(Error::InvalidInput("valuation of zero".into()));
        }
        let den = a.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: Vec<BigInt> = a.coords.iter().map(|c| (c * int_rat(&den)).to_integer()).collect();
        let vd = p.e as i64 * int_valuation(&den, p.p) as i64;
        Ok(self.int_valuation_at(p, &num) as i64 - vd)
    }

    /// Valuation of a nonzero integral coordinate vector.
    pub fn int_valuation_at(&self, p: &PrimeIdeal, v: &[BigInt]) -> u32 {
        let pb = BigInt::from(p.p);
        let mut x = v.to_vec();
        let mut k = 0;
        loop {
            // strip whole powers of p first: v_P(p) = e
            if x.iter().all(|c| (c % &pb).is_zero()) {
                for c in x.iter_mut() {
                    *c /= &pb;
                }
                k += p.e;
                continue;
            }
            let y = self.mul_int(&x, &p.beta);
            if !y.iter().all(|c| (c % &pb).is_zero()) {
                return k;
            }
            x = y.into_iter().map(|c| c / &pb).collect();
            k += 1;
        }
    }

    /// Valuation of an ideal at a prime: the minimum over its Z-basis.
    pub fn ideal_valuation(&self, p: &PrimeIdeal, a: &Ideal) -> u32 {
        (0..a.basis.rows())
            .filter(|&i| !a.basis.row(i).iter().all(Zero::is_zero))
            .map(|i| self.int_valuation_at(p, a.basis.row(i)))
            .min()
            .unwrap_or(0)
    }

    /// Factorization of an ideal into primes, sorted canonically.
    pub fn factor_ideal(&self, a: &Ideal) -> Result<Vec<(PrimeIdeal, u32)>> {
        let mut out = Vec::new();
        let mut rest = a.norm().clone();
        for (p, _) in crate::exactalg::intfactor::factorize(a.norm()) {
            let pu = p.to_u64().ok_or_else(|| Error::InvalidInput("prime too large".into()))?;
            for pr in self.factor_prime(pu)? {
                let v = self.ideal_valuation(&pr, a);
                if v > 0 {
                    rest /= pr.norm().pow(v);
                    out.push((pr, v));
                }
            }
        }
        if !rest.is_one() {
            return Err(Error::InvalidInput("ideal factorization does not account for the norm".into()));
        }
        Ok(out)
    }

    /// Primes above p with ramification and residue degrees, sorted by
    /// (f, e, basis). Dedekind's criterion when p does not divide the index of
    /// Z[θ]; otherwise the residue algebra O/pO is split through its radical.
    pub fn factor_prime(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        let pb = BigInt::from(p);
        let mut out = if !(self.index() % &pb).is_zero() {
            self.dedekind(p)?
        } else {
            self.split_residue_algebra(p)?
        };
        let n = self.degree() as u32;
        let total: u32 = out.iter().map(|q| q.e * q.f).sum();
        if total != n {
            return Err(Error::InvalidInput(format!("splitting of {p} does not add up ({total} != {n})")));
        }
        for q in &out {
            if *q.ideal.norm() != q.norm() {
                return Err(Error::InvalidInput(format!("prime above {p} has wrong norm")));
            }
        }
        out.sort_by(|a, b| (a.f, a.e, &a.ideal).cmp(&(b.f, b.e, &b.ideal)));
        Ok(out)
    }

    fn finish_prime(&self, p: u64, e: u32, f: u32, ideal: Ideal, gen: Option<FieldElement>) -> PrimeIdeal {
        let n = self.degree();
        let pb = BigInt::from(p);
        let pi = self.int_ideal(&pb);
        let gen = gen.unwrap_or_else(|| {
            let rows = ideal.basis.to_rows();
            let mut cands: Vec<Vec<BigInt>> = rows.clone();
            for i in 0..n {
                for j in i + 1..n {
                    cands.push(rows[i].iter().zip(&rows[j]).map(|(a, b)| a + b).collect());
                }
            }
            cands
                .into_iter()
                .map(|c| FieldElement::from_ints(&c))
                .find(|g| self.ideal_add(&pi, &self.principal_ideal(g).expect("nonzero")) == ideal)
                .expect("a two-element generator among small combinations")
        });
        // beta: nonzero mod p with beta·P ⊆ pO
        let cols: Vec<Vec<u64>> = (0..n)
            .map(|a| {
                let mut e = vec![BigInt::zero(); n];
                e[a] = BigInt::one();
                let mut col = Vec::with_capacity(n * n);
                for i in 0..n {
                    col.extend(self.mul_int(&e, ideal.basis.row(i)).iter().map(|c| reduce_big(c, p)));
                }
                col
            })
            .collect();
        let rows: Vec<Vec<u64>> = (0..n * n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        let ker = fp_kernel(&rows, n, p);
        let beta: Vec<BigInt> = ker
            .first()
            .expect("pP^-1 is strictly larger than pO")
            .iter()
            .map(|&x| BigInt::from(x))
            .collect();
        PrimeIdeal { p, e, f, ideal, gen, beta }
    }

    fn dedekind(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        let fp = FpPoly::from_qpoly(p, self.poly())?;
        let pe = self.from_int(p as i64);
        let mut out = Vec::new();
        for (g, e) in factor_mod_p(&fp)? {
            let gq = crate::exactalg::poly::QPoly::from_bigints(&g.to_bigints());
            let ge = self.from_poly(&gq);
            let ge_copy = ge.clone();
            let ideal = self.ideal_from_gens(&[pe.clone(), ge])?;
            out.push(self.finish_prime(p, e as u32, g.deg() as u32, ideal, Some(ge_copy)));
        }
        Ok(out)
    }

    fn split_residue_algebra(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        let rad = Ideal::from_rows(self.order().radical(p).to_rows(), self.degree())?;
        let mut maximal = Vec::new();
        self.split_semisimple(&rad, p, &mut maximal)?;
        let pi = self.int_ideal(&BigInt::from(p));
        let mut out = Vec::new();
        for m in maximal {
            let f = log_p(m.norm(), p).ok_or_else(|| Error::InvalidInput("maximal ideal norm not a power of p".into()))?;
            let mut e = 0;
            let mut power = self.unit_ideal();
            loop {
                let next = self.ideal_mul(&power, &m);
                if !next.contains_ideal(&pi) {
                    break;
                }
                power = next;
                e += 1;
            }
            out.push(self.finish_prime(p, e, f, m, None));
        }
        Ok(out)
    }

    /// Coordinates of O/I for an ideal I ⊇ pO: positions whose pivot is p.
    fn quotient_coords(&self, i: &Ideal, v: &[BigInt], p: u64) -> Vec<u64> {
        let r = i.reduce(v);
        i.residue_radices().iter().map(|(k, _)| reduce_big(&r[*k], p)).collect()
    }

    /// Splits the semisimple algebra O/I (I ⊇ p-radical) into its field factors.
    fn split_semisimple(&self, i: &Ideal, p: u64, out: &mut Vec<Ideal>) -> Result<()> {
        let n = self.degree();
        let radices = i.residue_radices();
        let dim = radices.len();
        let lift = |coords: &[u64]| -> Vec<BigInt> {
            let mut v = vec![BigInt::zero(); n];
            for ((k, _), &c) in radices.iter().zip(coords) {
                v[*k] = BigInt::from(c);
            }
            v
        };
        let pow_p = |v: &[BigInt]| -> Vec<BigInt> {
            let mut result = self.one().int_coords().expect("integral one");
            let mut base = v.to_vec();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    result = i.reduce(&self.mul_int(&result, &base));
                }
                base = i.reduce(&self.mul_int(&base, &base));
                e >>= 1;
            }
            result
        };
        // fixed points of Frobenius: a subalgebra isomorphic to F_p^s
        let mut rows: Vec<Vec<u64>> = vec![vec![0; dim]; dim];
        for a in 0..dim {
            let mut e = vec![0u64; dim];
            e[a] = 1;
            let v = lift(&e);
            let img = self.quotient_coords(i, &pow_p(&v), p);
            for b in 0..dim {
                rows[b][a] = (img[b] + p - e[b]) % p;
            }
        }
        let fixed = fp_kernel(&rows, dim, p);
        if fixed.len() <= 1 {
            out.push(i.clone());
            return Ok(());
        }
        let one_q = self.quotient_coords(i, &self.one().int_coords().expect("integral one"), p);
        let b = fixed
            .iter()
            .find(|v| fp_rank(&[one_q.clone(), (*v).clone()], p) == 2)
            .ok_or_else(|| Error::InvalidInput("no splitting element".into()))?;
        let bv = lift(b);
        for c in 0..p {
            let shifted: Vec<BigInt> = bv
                .iter()
                .zip(self.one().int_coords().expect("integral one"))
                .map(|(x, o)| x - o * BigInt::from(c))
                .collect();
            // is b - c a zero divisor mod I?
            let mat: Vec<Vec<u64>> = (0..dim)
                .map(|a| {
                    let mut e = vec![0u64; dim];
                    e[a] = 1;
                    self.quotient_coords(i, &self.mul_int(&shifted, &lift(&e)), p)
                })
                .collect();
            if fp_rank(&mat, p) == dim {
                continue;
            }
            // idempotent (b - c)^(p-1): 1 where b ≠ c, 0 where b = c
            let mut idem = self.one().int_coords().expect("integral one");
            for _ in 0..p - 1 {
                idem = i.reduce(&self.mul_int(&idem, &shifted));
            }
            let comp: Vec<BigInt> = self
                .one()
                .int_coords()
                .expect("integral one")
                .iter()
                .zip(&idem)
                .map(|(o, x)| o - x)
                .collect();
            let i1 = self.ideal_add_elem(i, &FieldElement::from_ints(&idem))?;
            let i2 = self.ideal_add_elem(i, &FieldElement::from_ints(&comp))?;
            self.split_semisimple(&i1, p, out)?;
            self.split_semisimple(&i2, p, out)?;
            return Ok(());
        }
        Err(Error::InvalidInput("failed to split residue algebra".into()))
    }
}

fn int_valuation(n: &BigInt, p: u64) -> u32 {
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut k = 0;
    while !m.is_zero() && (&m % &pb).is_zero() {
        m /= &pb;
        k += 1;
    }
    k
}

fn log_p(n: &BigInt, p: u64) -> Option<u32> {
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut k = 0;
    while (&m % &pb).is_zero() {
        m /= &pb;
        k += 1;
    }
    m.is_one().then_some(k)
}

/// Rational helper: the element x/d for integral x.
pub fn frac_elem(x: &[BigInt], d: &BigInt) -> FieldElement {
    FieldElement { coords: x.iter().map(|c| BigRational::new(c.clone(), d.clone())).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::field::parse_field;

    fn ef(k: &NumberField, p: u64) -> Vec<(u32, u32)> {
        k.factor_prime(p).unwrap().iter().map(|q| (q.e, q.f)).collect()
    }

    #[test]
    fn quadratic_splitting() {
        let k = parse_field("x^2-13").unwrap();
        assert_eq!(ef(&k, 2), vec![(1, 2)]);
        assert_eq!(ef(&k, 13), vec![(2, 1)]);
        assert_eq!(ef(&k, 3), vec![(1, 1), (1, 1)]);
        let k = parse_field("x^2-17").unwrap();
        assert_eq!(ef(&k, 2), vec![(1, 1), (1, 1)]);
        let k = parse_field("x^2+1").unwrap();
        assert_eq!(ef(&k, 2), vec![(2, 1)]);
    }

    #[test]
    fn index_prime_fallback_matches_dedekind() {
        // 2 divides [O : Z[√13]], so this exercises the residue-algebra path
        let k = parse_field("x^2-13").unwrap();
        assert_eq!(k.index(), &BigInt::from(2));
        let ps = k.factor_prime(2).unwrap();
        let k2 = parse_field("x^2-x-3").unwrap();
        let qs = k2.factor_prime(2).unwrap();
        assert_eq!(ps[0].ideal.norm(), qs[0].ideal.norm());
    }

    #[test]
    fn octic_prime_above_two() {
        let k = parse_field("x^8 - 4x^7 + 8x^6 - 6x^5 + 7x^4 - 10x^3 + 2x^2 - 6x + 9").unwrap();
        assert_eq!(ef(&k, 2), vec![(4, 2)]);
        let k = parse_field("x^8 + 5x^6 + 4x^4 + 5x^2 + 1").unwrap();
        assert_eq!(ef(&k, 2), vec![(2, 2), (2, 2)]);
    }

    #[test]
    fn norms_multiply() {
        let k = parse_field("x^3-x-1").unwrap();
        let a = k.principal_ideal(&k.add(&k.theta(), &k.from_int(3))).unwrap();
        let b = k.int_ideal(&BigInt::from(5));
        let ab = k.ideal_mul(&a, &b);
        assert_eq!(ab.norm(), &(a.norm() * b.norm()));
        let fac = k.factor_ideal(&ab).unwrap();
        let prod = fac.iter().fold(k.unit_ideal(), |acc, (p, e)| k.ideal_mul(&acc, &k.ideal_pow(&p.ideal, *e)));
        assert_eq!(prod, ab);
    }

    #[test]
    fn valuations() {
        let k = parse_field("x^2+1").unwrap();
        let p = k.factor_prime(2).unwrap().remove(0);
        assert_eq!(k.valuation(&p, &k.from_int(8)).unwrap(), 6);
        let one_plus_i = k.add(&k.one(), &k.theta());
        assert_eq!(k.valuation(&p, &one_plus_i).unwrap(), 1);
        let inv = k.inv(&one_plus_i).unwrap();
        assert_eq!(k.valuation(&p, &inv).unwrap(), -1);
        assert_eq!(k.valuation(&p, &k.from_int(3)).unwrap(), 0);
    }
}
