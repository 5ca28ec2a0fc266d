//! Class groups from Minkowski-bounded factor bases, with principality searches.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::abelian::AbelianQuotient;
use crate::exactalg::intfactor::primes_up_to;
use crate::exactalg::matrix::{hnf_basis, IntMatrix};
use crate::numfield::{FieldElement, Ideal, NumberField, PrimeIdeal};

use super::enumerate::short_elements;
use super::units::UnitGroup;

/// Default cap on enumerated candidates per search.
pub const DEFAULT_SEARCH_CAP: usize = 1_000_000;
const MAX_ROUNDS: usize = 24;

#[derive(Clone, Debug, Serialize)]
pub struct ClassGroup {
    pub invariants: Vec<BigInt>,
    pub generators: Vec<Ideal>,
    pub factor_base: Vec<PrimeIdeal>,
    #[serde(skip)]
    quotient: AbelianQuotient,
}

impl ClassGroup {
    pub fn order(&self) -> BigInt {
        self.invariants.iter().fold(BigInt::one(), |a, d| a * d)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    /// Class of ∏ P_i^{v_i} over the factor base, on the invariant generators.
    pub fn dlog_fb(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.quotient.dlog(v)
    }

    /// Class of an integral ideal. Ideals supported on the factor base use the
    /// relation data; others are located by testing I·∏g_i^{c_i} for
    /// principality over all classes c.
    pub fn class_of(&self, k: &NumberField, ideal: &Ideal, units: &UnitGroup, cap: usize) -> Result<Vec<BigInt>> {
        if self.is_trivial() {
            return Ok(vec![]);
        }
        let fact = k.factor_ideal(ideal)?;
        let mut v = vec![BigInt::zero(); self.factor_base.len()];
        let mut supported = true;
        for (p, e) in &fact {
            match self.factor_base.iter().position(|q| q == p) {
                Some(i) => v[i] += *e,
                None => supported = false,
            }
        }
        if supported {
            return Ok(self.dlog_fb(&v));
        }
        for c in self.quotient.elements(100_000)? {
            let mut j = ideal.clone();
            for (g, e) in self.generators.iter().zip(&c) {
                j = k.ideal_mul(&j, &k.ideal_pow(g, e.to_u32().expect("reduced exponent")));
            }
            if principal_generator(k, &j, Some(units), cap)?.is_some() {
                return Ok(c.iter().zip(&self.invariants).map(|(x, d)| (-x).mod_floor(d)).collect());
            }
        }
        Err(Error::Inconclusive("ideal class not located".into()))
    }

    /// All classes, as reduced vectors on the invariant generators.
    pub fn elements(&self) -> Result<Vec<Vec<BigInt>>> {
        self.quotient.elements(100_000)
    }
}

/// Exponent vector of (α) over the factor base, if α factors completely.
pub fn factor_over_fb(k: &NumberField, fb: &[PrimeIdeal], a: &FieldElement) -> Option<Vec<BigInt>> {
    let mut rest = k.norm(a).abs().to_integer();
    if rest.is_zero() {
        return None;
    }
    let mut out = Vec::with_capacity(fb.len());
    for p in fb {
        let pb = BigInt::from(p.p);
        if !(&rest % &pb).is_zero() {
            out.push(BigInt::zero());
            continue;
        }
        let v = k.valuation(p, a).ok()?;
        if v > 0 {
            rest /= p.norm().pow(v as u32);
        }
        out.push(BigInt::from(v));
    }
    rest.is_one().then_some(out)
}

/// T2 bound below which every principal ideal of norm N has a generator,
/// given a finite-index unit subgroup: reduce the log vector of a generator
/// into the fundamental parallelotope of the unit lattice.
pub fn generator_t2_bound(k: &NumberField, units: &UnitGroup, norm: &BigInt) -> f64 {
    let n = k.degree();
    let (r1, r2) = k.signature();
    let logs: Vec<Vec<f64>> = units
        .fundamental_units
        .iter()
        .map(|u| {
            (0..r1 + r2)
                .map(|j| {
                    let (re, im) = k.embed_f64(u, j);
                    (re * re + im * im).sqrt().ln().abs()
                })
                .collect()
        })
        .collect();
    let mut total = 0.0;
    for j in 0..r1 + r2 {
        let s: f64 = logs.iter().map(|l| l[j]).sum();
        let w = if j < r1 { 1.0 } else { 2.0 };
        total += w * s.exp();
    }
    let nf = norm.to_f64().unwrap_or(f64::INFINITY);
    nf.powf(2.0 / n as f64) * total * (1.0 + 1e-6) + 1e-6
}

/// Smallest T2 any element of norm N can have: n·N^{2/n}.
fn min_t2(k: &NumberField, norm: &BigInt) -> f64 {
    let n = k.degree() as f64;
    n * norm.to_f64().unwrap_or(f64::INFINITY).powf(2.0 / n)
}

/// Searches for a generator of the ideal. With units, an exhausted search up
/// to the generator bound proves non-principality (`Ok(None)`); without
/// units only a positive answer is conclusive.
pub fn principal_generator(
    k: &NumberField,
    ideal: &Ideal,
    units: Option<&UnitGroup>,
    cap: usize,
) -> Result<Option<FieldElement>> {
    if ideal.is_unit() {
        return Ok(Some(k.one()));
    }
    let n_i = ideal.norm().clone();
    let full = units.map(|u| generator_t2_bound(k, u, &n_i));
    let mut bound = min_t2(k, &n_i) * 1.5;
    loop {
        let b = full.map_or(bound, |f| bound.min(f));
        let elems = short_elements(k, ideal, b, cap)?;
        if let Some(g) = elems.into_iter().find(|a| k.norm(a).abs().to_integer() == n_i) {
            return Ok(Some(g));
        }
        match full {
            Some(f) if b >= f => return Ok(None),
            _ => {}
        }
        bound *= 2.0;
        if full.is_none() && bound > 1e12 {
            return Err(Error::Inconclusive("principality search without units exhausted".into()));
        }
    }
}

/// Prime ideals of norm at most `bound`, sorted by (norm, p, basis).
pub fn primes_of_norm_up_to(k: &NumberField, bound: u64) -> Result<Vec<PrimeIdeal>> {
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        for q in k.factor_prime(p)? {
            if q.norm() <= BigInt::from(bound) {
                out.push(q);
            }
        }
    }
    out.sort_by(|a, b| (a.norm(), a.p, &a.ideal).cmp(&(b.norm(), b.p, &b.ideal)));
    Ok(out)
}

fn fb_ideal(k: &NumberField, fb: &[PrimeIdeal], v: &[BigInt]) -> Ideal {
    let mut acc = k.unit_ideal();
    for (p, e) in fb.iter().zip(v) {
        let e = e.to_u32().expect("nonnegative small exponent");
        if e > 0 {
            acc = k.ideal_mul(&acc, &k.ideal_pow(&p.ideal, e));
        }
    }
    acc
}

/// Class group of K. Relations come from small elements of the factor-base
/// primes; every nontrivial class of the resulting candidate group is then
/// proven non-principal by an exhaustive generator search.
pub fn class_group(k: &NumberField, units: Option<&UnitGroup>, cap: usize) -> Result<ClassGroup> {
    let mink = k.minkowski_bound().floor() as u64;
    let fb = primes_of_norm_up_to(k, mink)?;
    let m = fb.len();
    let trivial = |fb: Vec<PrimeIdeal>| ClassGroup {
        invariants: vec![],
        generators: vec![],
        factor_base: fb,
        quotient: AbelianQuotient::new(&IntMatrix::zeros(0, 0), 0),
    };
    if m == 0 {
        return Ok(trivial(fb));
    }
    let mut rels: Vec<Vec<BigInt>> = Vec::new();
    let mut seen = HashSet::new();
    let mut settled = vec![false; m];
    let mut scale = 1.5;
    let mut quotient = None;
    for _ in 0..MAX_ROUNDS {
        for (i, p) in fb.iter().enumerate() {
            if settled[i] {
                continue;
            }
            let b = min_t2(k, &p.norm()) * scale;
            for a in short_elements(k, &p.ideal, b, cap)? {
                if let Some(v) = factor_over_fb(k, &fb, &a) {
                    if k.norm(&a).abs().to_integer() == p.norm() {
                        settled[i] = true;
                    }
                    if seen.insert(v.clone()) {
                        rels.push(v);
                    }
                }
            }
        }
        rels = hnf_basis(&IntMatrix::from_big_rows(rels, m)).to_rows();
        let q = AbelianQuotient::new(&IntMatrix::from_big_rows(rels.clone(), m), m);
        if q.order().is_some() {
            quotient = Some(q);
            break;
        }
        scale *= 2.0;
    }
    let mut q = quotient.ok_or_else(|| Error::Inconclusive("relation search did not reach full rank".into()))?;
    // Certify: each nontrivial candidate class must be non-principal.
    'verify: loop {
        if q.is_trivial() {
            return Ok(trivial(fb));
        }
        let units = units.ok_or_else(|| {
            Error::Inconclusive("non-principality proofs need a unit group".into())
        })?;
        let exponent = q.exponent().expect("finite");
        for g in q.elements(100_000)? {
            if g.iter().all(Zero::is_zero) {
                continue;
            }
            let rep = class_representative(&q, &fb, &g, &exponent);
            let ideal = fb_ideal(k, &fb, &rep);
            if let Some(a) = principal_generator(k, &ideal, Some(units), cap)? {
                let v = factor_over_fb(k, &fb, &a).expect("generator of a factor-base ideal factors");
                rels.push(v);
                q = AbelianQuotient::new(&IntMatrix::from_big_rows(rels.clone(), m), m);
                continue 'verify;
            }
        }
        break;
    }
    let exponent = q.exponent().expect("finite");
    let generators = (0..q.invariants.len())
        .map(|i| {
            let v: Vec<BigInt> = q.generator(i).iter().map(|x| x.mod_floor(&exponent)).collect();
            fb_ideal(k, &fb, &v)
        })
        .collect();
    Ok(ClassGroup { invariants: q.invariants.clone(), generators, factor_base: fb, quotient: q })
}

/// A small nonnegative factor-base vector in the class g: a single prime or a
/// product of two when possible, else the generator combination.
fn class_representative(q: &AbelianQuotient, fb: &[PrimeIdeal], g: &[BigInt], exponent: &BigInt) -> Vec<BigInt> {
    let m = fb.len();
    let unit = |i: usize| -> Vec<BigInt> { (0..m).map(|j| BigInt::from(u8::from(i == j))).collect() };
    for i in 0..m {
        if q.dlog(&unit(i)) == g {
            return unit(i);
        }
    }
    for i in 0..m {
        for j in i..m {
            let mut v = unit(i);
            v[j] += 1;
            if q.dlog(&v) == g {
                return v;
            }
        }
    }
    let mut v = vec![BigInt::zero(); m];
    for (i, gi) in g.iter().enumerate() {
        for (x, y) in v.iter_mut().zip(q.generator(i)) {
            *x += gi * y;
        }
    }
    v.into_iter().map(|x| x.mod_floor(exponent)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfield::units::unit_group;
    use crate::numfield::parse_field;

    fn invariants(poly: &str) -> Vec<i64> {
        let k = parse_field(poly).unwrap();
        let u = unit_group(&k, None, None).unwrap();
        class_group(&k, Some(&u), DEFAULT_SEARCH_CAP)
            .unwrap()
            .invariants
            .iter()
            .map(|d| d.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn small_quadratic_class_groups() {
        assert_eq!(invariants("x^2+5"), vec![2]);
        assert_eq!(invariants("x^2-13"), Vec::<i64>::new());
        assert_eq!(invariants("x^2-17"), Vec::<i64>::new());
        assert_eq!(invariants("x^2+23"), vec![3]);
        assert_eq!(invariants("x^2+14"), vec![4]);
        assert_eq!(invariants("x^2-10"), vec![2]);
        assert_eq!(invariants("x^2+1"), Vec::<i64>::new());
    }

    #[test]
    fn principality_search() {
        let k = parse_field("x^2+5").unwrap();
        let u = unit_group(&k, None, None).unwrap();
        let p2 = k.factor_prime(2).unwrap().remove(0);
        assert!(principal_generator(&k, &p2.ideal, Some(&u), 10_000).unwrap().is_none());
        let p3 = k.factor_prime(3).unwrap();
        let prod = k.ideal_mul(&p2.ideal, &p3[0].ideal);
        let g = principal_generator(&k, &prod, Some(&u), 10_000).unwrap().unwrap();
        assert_eq!(k.norm(&g).abs(), crate::exactalg::rat(6));
    }
}
