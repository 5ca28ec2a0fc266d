//! Moduli and the groups (O/m)* with sign characters at real places.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::abelian::{AbelianQuotient, ClosureGroup};
use crate::numfield::{FieldElement, Ideal, NumberField, PrimeIdeal};

/// Cap on |O/m| for the residue enumeration.
pub const RESIDUE_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, Serialize)]
pub struct Modulus {
    pub finite_part: Ideal,
    pub factors: Vec<(PrimeIdeal, u32)>,
    /// Indices of real embeddings (all below r1).
    pub real_places: Vec<usize>,
}

impl Modulus {
    pub fn new(k: &NumberField, factors: Vec<(PrimeIdeal, u32)>, real_places: Vec<usize>) -> Result<Self> {
        let (r1, _) = k.signature();
        if let Some(&j) = real_places.iter().find(|&&j| j >= r1) {
            return Err(Error::InvalidInput(format!("embedding {j} is not real")));
        }
        let mut factors: Vec<_> = factors.into_iter().filter(|(_, e)| *e > 0).collect();
        factors.sort_by(|a, b| (a.0.norm(), &a.0.ideal).cmp(&(b.0.norm(), &b.0.ideal)));
        let mut real_places = real_places;
        real_places.sort_unstable();
        real_places.dedup();
        let finite_part = factors
            .iter()
            .fold(k.unit_ideal(), |acc, (p, e)| k.ideal_mul(&acc, &k.ideal_pow(&p.ideal, *e)));
        Ok(Modulus { finite_part, factors, real_places })
    }

    pub fn from_ideal(k: &NumberField, ideal: &Ideal, real_places: Vec<usize>) -> Result<Self> {
        Modulus::new(k, k.factor_ideal(ideal)?, real_places)
    }

    pub fn trivial(k: &NumberField) -> Self {
        Modulus { finite_part: k.unit_ideal(), factors: vec![], real_places: vec![] }
    }

    /// Every real place and no finite part.
    pub fn real_places_only(k: &NumberField) -> Self {
        Modulus { finite_part: k.unit_ideal(), factors: vec![], real_places: (0..k.signature().0).collect() }
    }

    pub fn norm(&self) -> &BigInt {
        self.finite_part.norm()
    }

    /// Same modulus with the exponent at factor i replaced.
    pub fn with_exponent(&self, k: &NumberField, i: usize, e: u32) -> Self {
        let mut f = self.factors.clone();
        f[i].1 = e;
        Modulus::new(k, f, self.real_places.clone()).expect("places already validated")
    }

    pub fn without_place(&self, k: &NumberField, j: usize) -> Self {
        let places = self.real_places.iter().copied().filter(|&x| x != j).collect();
        Modulus::new(k, self.factors.clone(), places).expect("places already validated")
    }

    /// |(O/m)*| = ∏ N(P)^{e−1}(N(P) − 1).
    pub fn phi(&self) -> BigInt {
        self.factors.iter().fold(BigInt::one(), |acc, (p, e)| {
            let q = p.norm();
            acc * q.pow(e - 1) * (q - 1u32)
        })
    }

    pub fn is_coprime(&self, k: &NumberField, a: &FieldElement) -> bool {
        !a.is_zero() && self.factors.iter().all(|(p, _)| k.valuation(p, a).is_ok_and(|v| v == 0))
    }
}

/// Sign bits of a at the given real places (1 for negative).
pub fn signs(k: &NumberField, a: &FieldElement, places: &[usize]) -> Result<Vec<BigInt>> {
    places
        .iter()
        .map(|&j| {
            let re = k.embed(a, j).re_interval();
            if re.lo.is_positive() {
                Ok(BigInt::zero())
            } else if re.hi.is_negative() {
                Ok(BigInt::one())
            } else {
                Err(Error::Precision(format!("sign of an element at real place {j} not certified")))
            }
        })
        .collect()
}

/// (O/m)* as an abstract group: the residue part discovered by closure over
/// canonical residues, plus one Z/2 sign character per real place of m.
pub struct ResidueUnits {
    pub modulus: Modulus,
    group: ClosureGroup<Vec<BigInt>>,
    pub quotient: AbelianQuotient,
    /// Smallest positive integer in the finite part.
    exponent_int: BigInt,
}

impl ResidueUnits {
    /// Invariants of the residue part (sign characters excluded).
    pub fn invariants(&self) -> &[BigInt] {
        &self.quotient.invariants
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Residue generators, as integral-basis coordinates reduced mod m.
    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.group.gens
    }

    pub fn ngens(&self) -> usize {
        self.group.gens.len()
    }

    pub fn relation_rows(&self) -> Vec<Vec<BigInt>> {
        self.group.relation_matrix().to_rows()
    }

    /// Canonical residue of a mod m; a may have denominators prime to m.
    pub fn residue(&self, k: &NumberField, a: &FieldElement) -> Result<Vec<BigInt>> {
        if !self.modulus.is_coprime(k, a) {
            return Err(Error::Precondition("element not coprime to the modulus".into()));
        }
        let den = a.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: Vec<BigInt> = a.coords.iter().map(|c| (c * BigRational::from(den.clone())).to_integer()).collect();
        let m = &self.exponent_int;
        let inv = if m.is_one() {
            BigInt::zero()
        } else {
            let e = den.extended_gcd(m);
            if !e.gcd.is_one() {
                return Err(Error::Precondition("denominator not coprime to the modulus".into()));
            }
            e.x.mod_floor(m)
        };
        let v: Vec<BigInt> = num.iter().map(|x| x * &inv).collect();
        Ok(self.modulus.finite_part.reduce(&v))
    }

    /// Exponent vector of the residue of a on the residue generators.
    pub fn log_residue(&self, k: &NumberField, a: &FieldElement) -> Result<Vec<BigInt>> {
        let r = self.residue(k, a)?;
        self.log_reduced(&r)
    }

    pub fn log_reduced(&self, r: &[BigInt]) -> Result<Vec<BigInt>> {
        self.group
            .log(&r.to_vec())
            .ok_or_else(|| Error::Precondition("residue not in (O/m)*".into()))
    }

    /// All residues in the group with their exponent vectors.
    pub fn table(&self) -> impl Iterator<Item = (&Vec<BigInt>, Vec<BigInt>)> {
        let k = self.group.gens.len();
        self.group.table.iter().map(move |(r, v)| {
            let mut w: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
            w.resize(k, BigInt::zero());
            (r, w)
        })
    }
}

/// Builds (O/m)* by closure: residues are enumerated in mixed-radix order
/// over the HNF pivots and added as generators until the order reaches φ(m).
pub fn multiplicative_group_mod(k: &NumberField, m: &Modulus) -> Result<ResidueUnits> {
    let n = k.degree();
    let size = m.norm().to_u64().filter(|&s| s <= RESIDUE_CAP).ok_or_else(|| {
        Error::Inconclusive(format!("|O/m| = {} exceeds the residue enumeration cap", m.norm()))
    })?;
    let one: Vec<BigInt> = m.finite_part.reduce(&k.one().int_coords().expect("integral"));
    let mut group = ClosureGroup::new(one);
    let target = m.phi().to_usize().expect("bounded by cap");
    let radices = m.finite_part.residue_radices();
    let ideal = &m.finite_part;
    let mul = |a: &Vec<BigInt>, b: &Vec<BigInt>| ideal.reduce(&k.mul_int(a, b));
    let mut idx = vec![BigInt::zero(); radices.len()];
    for _ in 0..size {
        if group.order() >= target {
            break;
        }
        let mut v = vec![BigInt::zero(); n];
        for ((pos, _), x) in radices.iter().zip(&idx) {
            v[*pos] = x.clone();
        }
        let v = ideal.reduce(&v);
        let coprime = !v.iter().all(Zero::is_zero) && m.factors.iter().all(|(p, _)| k.int_valuation_at(p, &v) == 0);
        if coprime && !group.contains(&v) {
            group.add_generator(v, mul, 4 * target + 16)?;
        }
        // mixed-radix increment
        for (x, (_, d)) in idx.iter_mut().zip(&radices) {
            *x += 1;
            if &*x < d {
                break;
            }
            *x = BigInt::zero();
        }
    }
    if group.order() != target {
        return Err(Error::Inconclusive(format!("(O/m)* closure reached {} of {target}", group.order())));
    }
    let quotient = AbelianQuotient::new(&group.relation_matrix(), group.gens.len());
    let exponent_int = m.finite_part.min_integer(k);
    Ok(ResidueUnits { modulus: m.clone(), group, quotient, exponent_int })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::parse_field;

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| x.to_i64().unwrap()).collect()
    }

    #[test]
    fn residues_over_the_rationals() {
        let k = parse_field("x").unwrap();
        let m = Modulus::from_ideal(&k, &k.int_ideal(&BigInt::from(8)), vec![0]).unwrap();
        let g = multiplicative_group_mod(&k, &m).unwrap();
        assert_eq!(ints(g.invariants()), vec![2, 2]);
        assert_eq!(g.order(), 4);
    }

    #[test]
    fn inert_two_in_sqrt13() {
        let k = parse_field("x^2-x-3").unwrap();
        let m = Modulus::from_ideal(&k, &k.int_ideal(&BigInt::from(2)), vec![]).unwrap();
        let g = multiplicative_group_mod(&k, &m).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(ints(g.invariants()), vec![3]);
    }

    #[test]
    fn split_prime_powers() {
        // 2 splits in Q(√17); (O/4)* ≅ (Z/4)* × (Z/4)*
        let k = parse_field("x^2-x-4").unwrap();
        let m = Modulus::from_ideal(&k, &k.int_ideal(&BigInt::from(4)), vec![0, 1]).unwrap();
        assert_eq!(m.phi(), BigInt::from(4));
        let g = multiplicative_group_mod(&k, &m).unwrap();
        assert_eq!(ints(g.invariants()), vec![2, 2]);
        // logs respect multiplication
        let a = k.from_int(3);
        let b = k.add(&k.scale(&k.theta(), &crate::exactalg::rat(2)), &k.one());
        let ab = k.mul(&a, &b);
        let sum: Vec<BigInt> = g.log_residue(&k, &a).unwrap().iter().zip(g.log_residue(&k, &b).unwrap()).map(|(x, y)| x + y).collect();
        assert_eq!(g.quotient.dlog(&sum), g.quotient.dlog(&g.log_residue(&k, &ab).unwrap()));
        assert!(g.log_residue(&k, &k.from_int(2)).is_err());
    }

    #[test]
    fn signs_at_real_places() {
        let k = parse_field("x^2-13").unwrap();
        let t = k.theta();
        let s = signs(&k, &t, &[0, 1]).unwrap();
        assert_eq!(s.iter().filter(|x| x.is_one()).count(), 1);
    }
}
