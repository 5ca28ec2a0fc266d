//! Ray class groups from the sequence O* → (O/m)* × signs → Cl_m → Cl → 0.
//!
//! Coordinates: residue generators of (O/m)*, then one Z/2 per real place of
//! m, then primes Q_i coprime to m whose classes generate Cl.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactalg::abelian::AbelianQuotient;
use crate::exactalg::intfactor::primes_up_to;
use crate::exactalg::matrix::{hnf_basis, IntMatrix};
use crate::numfield::{FieldElement, Ideal, NumberField};

use super::classgroup::{principal_generator, ClassGroup};
use super::modulus::{multiplicative_group_mod, signs, Modulus, ResidueUnits};
use super::units::UnitGroup;

/// Primes searched for generating ideals.
const GENERATOR_PRIME_LIMIT: u64 = 5000;

pub struct RayClassGroup {
    pub modulus: Modulus,
    pub invariants: Vec<BigInt>,
    /// Prime ideals coprime to m whose classes generate the group, with logs.
    pub generator_ideals: Vec<(Ideal, Vec<BigInt>)>,
    pub residues: ResidueUnits,
    /// Order of Cl_m equals h·φ(m)·2^s / |image of units|.
    pub exactness_verified: bool,
    quotient: AbelianQuotient,
    cl_primes: Vec<(Ideal, Vec<BigInt>)>,
    class_group: ClassGroup,
    units: UnitGroup,
    cap: usize,
}

impl RayClassGroup {
    pub fn order(&self) -> BigInt {
        self.invariants.iter().fold(BigInt::one(), |a, d| a * d)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn quotient(&self) -> &AbelianQuotient {
        &self.quotient
    }

    fn nres(&self) -> usize {
        self.residues.ngens()
    }

    fn nsigns(&self) -> usize {
        self.modulus.real_places.len()
    }

    /// Total number of coordinates of the presentation.
    pub fn ncoords(&self) -> usize {
        self.nres() + self.nsigns() + self.cl_primes.len()
    }

    /// Presentation coordinates of the principal ideal (a), a coprime to m.
    pub fn psi(&self, k: &NumberField, a: &FieldElement) -> Result<Vec<BigInt>> {
        psi(k, &self.residues, a, self.cl_primes.len())
    }

    /// Class of an element of (O/m)* (given by its residue log) with the
    /// given sign vector, on the invariant generators.
    pub fn dlog_residue(&self, residue_log: &[BigInt], sign_bits: &[BigInt]) -> Vec<BigInt> {
        let mut v = residue_log.to_vec();
        v.extend_from_slice(sign_bits);
        v.resize(self.ncoords(), BigInt::zero());
        self.quotient.dlog(&v)
    }

    /// Class of a sign generator (element ≡ 1 mod m, negative only at place i of m).
    pub fn dlog_sign(&self, i: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.ncoords()];
        v[self.nres() + i] = BigInt::one();
        self.quotient.dlog(&v)
    }

    /// Class of an integral ideal coprime to m.
    pub fn dlog_ideal(&self, k: &NumberField, ideal: &Ideal) -> Result<Vec<BigInt>> {
        for (p, _) in &self.modulus.factors {
            if k.ideal_valuation(p, ideal) > 0 {
                return Err(Error::Precondition("ideal not coprime to the modulus".into()));
            }
        }
        let b = self.class_group.class_of(k, ideal, &self.units, self.cap)?;
        let q = cover_class(&self.class_group, &self.cl_primes, &b)?;
        let mut j = ideal.clone();
        for ((qi, _), e) in self.cl_primes.iter().zip(&q) {
            j = k.ideal_mul(&j, &k.ideal_pow(qi, *e));
        }
        let beta = principal_generator(k, &j, Some(&self.units), self.cap)?
            .ok_or_else(|| Error::Inconclusive("expected principal ideal has no generator".into()))?;
        let mut v = self.psi(k, &beta)?;
        let off = self.nres() + self.nsigns();
        for (i, e) in q.iter().enumerate() {
            v[off + i] -= *e;
        }
        Ok(self.quotient.dlog(&v))
    }
}

fn psi(k: &NumberField, res: &ResidueUnits, a: &FieldElement, t: usize) -> Result<Vec<BigInt>> {
    let mut v = res.log_residue(k, a)?;
    v.extend(signs(k, a, &res.modulus.real_places)?);
    v.extend(std::iter::repeat(BigInt::zero()).take(t));
    Ok(v)
}

/// Exponents q ∈ ∏[0, exp) with Σ q_i [Q_i] = −b in Cl.
fn cover_class(cl: &ClassGroup, qs: &[(Ideal, Vec<BigInt>)], b: &[BigInt]) -> Result<Vec<u32>> {
    if cl.is_trivial() {
        return Ok(vec![0; qs.len()]);
    }
    let e = cl.invariants.iter().fold(BigInt::one(), |a, d| a.lcm(d)).to_u32().expect("small class group");
    let t = qs.len();
    let mut q = vec![0u32; t];
    loop {
        let ok = cl.invariants.iter().enumerate().all(|(i, d)| {
            let s: BigInt = qs.iter().zip(&q).map(|((_, c), &x)| &c[i] * x).sum::<BigInt>() + &b[i];
            s.mod_floor(d).is_zero()
        });
        if ok {
            return Ok(q);
        }
        let mut i = 0;
        loop {
            if i == t {
                return Err(Error::Inconclusive("class not covered by chosen primes".into()));
            }
            q[i] += 1;
            if q[i] < e {
                break;
            }
            q[i] = 0;
            i += 1;
        }
    }
}

/// Closure of a set of vectors in ⊕ Z/d_i.
fn span(gens: &[Vec<BigInt>], inv: &[BigInt]) -> HashSet<Vec<BigInt>> {
    let zero = vec![BigInt::zero(); inv.len()];
    let mut seen: HashSet<Vec<BigInt>> = HashSet::from([zero.clone()]);
    let mut stack = vec![zero];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y: Vec<BigInt> = x.iter().zip(g).zip(inv).map(|((a, b), d)| (a + b).mod_floor(d)).collect();
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Primes coprime to m, lying over p = 2, 3, 5, … up to `limit`, visited in
/// order until `visit` returns true.
fn scan_coprime_primes(
    k: &NumberField,
    m: &Modulus,
    limit: u64,
    mut visit: impl FnMut(Ideal) -> Result<bool>,
) -> Result<bool> {
    for p in primes_up_to(limit) {
        for q in k.factor_prime(p)? {
            if !m.factors.iter().any(|(r, _)| r == &q) && visit(q.ideal)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn ray_class_group(
    k: &NumberField,
    m: &Modulus,
    units: &UnitGroup,
    cl: &ClassGroup,
    cap: usize,
) -> Result<RayClassGroup> {
    let residues = multiplicative_group_mod(k, m)?;
    let r = residues.ngens();
    let s = m.real_places.len();
    // primes covering Cl
    let mut cl_primes: Vec<(Ideal, Vec<BigInt>)> = Vec::new();
    let h = cl.order().to_usize().expect("small class group");
    if h > 1 {
        let mut reached = 1;
        let done = scan_coprime_primes(k, m, GENERATOR_PRIME_LIMIT, |q| {
            let c = cl.class_of(k, &q, units, cap)?;
            let mut gens: Vec<Vec<BigInt>> = cl_primes.iter().map(|(_, c)| c.clone()).collect();
            gens.push(c.clone());
            let size = span(&gens, &cl.invariants).len();
            if size > reached {
                reached = size;
                cl_primes.push((q, c));
            }
            Ok(reached == h)
        })?;
        if !done {
            return Err(Error::Inconclusive("no primes coprime to the modulus generate Cl".into()));
        }
    }
    let t = cl_primes.len();
    let dim = r + s + t;
    let pad = |mut v: Vec<BigInt>| {
        v.resize(dim, BigInt::zero());
        v
    };
    let mut rels: Vec<Vec<BigInt>> = residues.relation_rows().into_iter().map(pad).collect();
    for j in 0..s {
        let mut v = vec![BigInt::zero(); dim];
        v[r + j] = BigInt::from(2);
        rels.push(v);
    }
    let mut unit_rows = Vec::new();
    for u in std::iter::once(&units.torsion_generator).chain(&units.fundamental_units) {
        unit_rows.push(psi(k, &residues, u, t)?);
    }
    rels.extend(unit_rows.iter().cloned());
    // relations among the covering primes: HNF rows of the kernel of Z^t → Cl
    if t > 0 {
        let e = cl.invariants.iter().fold(BigInt::one(), |a, d| a.lcm(d)).to_u32().expect("small");
        let mut kernel: Vec<Vec<BigInt>> = (0..t)
            .map(|i| (0..t).map(|j| if i == j { BigInt::from(e) } else { BigInt::zero() }).collect())
            .collect();
        let mut q = vec![0u32; t];
        'odo: loop {
            let zero = cl.invariants.iter().enumerate().all(|(i, d)| {
                let s: BigInt = cl_primes.iter().zip(&q).map(|((_, c), &x)| &c[i] * x).sum();
                s.mod_floor(d).is_zero()
            });
            if zero && q.iter().any(|&x| x > 0) {
                kernel.push(q.iter().map(|&x| BigInt::from(x)).collect());
            }
            let mut i = 0;
            loop {
                if i == t {
                    break 'odo;
                }
                q[i] += 1;
                if q[i] < e {
                    break;
                }
                q[i] = 0;
                i += 1;
            }
        }
        for b in hnf_basis(&IntMatrix::from_big_rows(kernel, t)).to_rows() {
            let mut j = k.unit_ideal();
            for ((qi, _), x) in cl_primes.iter().zip(&b) {
                j = k.ideal_mul(&j, &k.ideal_pow(qi, x.to_u32().expect("nonnegative HNF row")));
            }
            let beta = principal_generator(k, &j, Some(units), cap)?
                .ok_or_else(|| Error::Inconclusive("relation among class representatives not realized".into()))?;
            let mut v = psi(k, &residues, &beta, t)?;
            for (i, x) in b.iter().enumerate() {
                v[r + s + i] -= x;
            }
            rels.push(v.into_iter().map(|x| -x).collect());
        }
    }
    let quotient = AbelianQuotient::new(&IntMatrix::from_big_rows(rels, dim), dim);
    // exactness: |Cl_m| = h · |(O/m)* × signs| / |unit image|
    let local_dim = r + s;
    let mut local_rels: Vec<Vec<BigInt>> =
        residues.relation_rows().into_iter().map(|mut v| { v.resize(local_dim, BigInt::zero()); v }).collect();
    for j in 0..s {
        let mut v = vec![BigInt::zero(); local_dim];
        v[r + j] = BigInt::from(2);
        local_rels.push(v);
    }
    let local_order = m.phi() * BigInt::from(2u32).pow(s as u32);
    let mut with_units = local_rels.clone();
    with_units.extend(unit_rows.iter().map(|v| v[..local_dim].to_vec()));
    let coker = AbelianQuotient::new(&IntMatrix::from_big_rows(with_units, local_dim), local_dim)
        .order()
        .expect("finite");
    let image = &local_order / &coker;
    let order = quotient.order().ok_or_else(|| Error::Inconclusive("ray class group came out infinite".into()))?;
    let exactness_verified = order == BigInt::from(h) * &local_order / &image
        && unit_rows.iter().all(|v| quotient.is_zero_class(v));
    if !exactness_verified {
        return Err(Error::Inconclusive("ray class sequence failed its exactness check".into()));
    }
    let mut out = RayClassGroup {
        modulus: m.clone(),
        invariants: quotient.invariants.clone(),
        generator_ideals: vec![],
        residues,
        exactness_verified,
        quotient,
        cl_primes,
        class_group: cl.clone(),
        units: units.clone(),
        cap,
    };
    out.generator_ideals = generating_primes(k, &out)?;
    Ok(out)
}

fn generating_primes(k: &NumberField, g: &RayClassGroup) -> Result<Vec<(Ideal, Vec<BigInt>)>> {
    if g.is_trivial() {
        return Ok(vec![]);
    }
    let order = g.order().to_usize().filter(|&o| o <= 1 << 16).ok_or_else(|| {
        Error::Inconclusive("ray class group too large for generator search".into())
    })?;
    let mut out: Vec<(Ideal, Vec<BigInt>)> = Vec::new();
    let mut reached = 1;
    let done = scan_coprime_primes(k, &g.modulus, GENERATOR_PRIME_LIMIT, |q| {
        let c = g.dlog_ideal(k, &q)?;
        let mut gens: Vec<Vec<BigInt>> = out.iter().map(|(_, c)| c.clone()).collect();
        gens.push(c.clone());
        let size = span(&gens, &g.invariants).len();
        if size > reached {
            reached = size;
            out.push((q, c));
        }
        Ok(reached == order)
    })?;
    if done {
        return Ok(out);
    }
    Err(Error::Inconclusive("small primes do not generate the ray class group".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfield::classgroup::class_group;
    use crate::classfield::units::unit_group;
    use crate::numfield::parse_field;

    fn setup(poly: &str) -> (NumberField, UnitGroup, ClassGroup) {
        let k = parse_field(poly).unwrap();
        let u = unit_group(&k, None, None).unwrap();
        let c = class_group(&k, Some(&u), 100_000).unwrap();
        (k, u, c)
    }

    fn inv(g: &RayClassGroup) -> Vec<i64> {
        g.invariants.iter().map(|d| d.to_i64().unwrap()).collect()
    }

    #[test]
    fn rationals_mod_eight_infinity() {
        let (k, u, c) = setup("x");
        let m = Modulus::from_ideal(&k, &k.int_ideal(&BigInt::from(8)), vec![0]).unwrap();
        let g = ray_class_group(&k, &m, &u, &c, 10_000).unwrap();
        assert_eq!(inv(&g), vec![2, 2]);
        // Frobenius of 7 and of 17 ≡ 1 mod 8
        let p7 = k.int_ideal(&BigInt::from(7));
        assert!(g.dlog_ideal(&k, &p7).unwrap().iter().any(|x| !x.is_zero()));
        let p17 = k.int_ideal(&BigInt::from(17));
        assert!(g.dlog_ideal(&k, &p17).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn narrow_and_wide_sqrt13() {
        let (k, u, c) = setup("x^2-x-3");
        let wide = ray_class_group(&k, &Modulus::trivial(&k), &u, &c, 10_000).unwrap();
        assert!(wide.is_trivial());
        let narrow = ray_class_group(&k, &Modulus::real_places_only(&k), &u, &c, 10_000).unwrap();
        assert!(narrow.is_trivial());
        // Q(√3): fundamental unit of norm +1, so the narrow class group has order 2
        let (k3, u3, c3) = setup("x^2-3");
        let n3 = ray_class_group(&k3, &Modulus::real_places_only(&k3), &u3, &c3, 10_000).unwrap();
        assert_eq!(inv(&n3), vec![2]);
    }

    #[test]
    fn nontrivial_class_group_enters() {
        // Q(√−5): Cl = Z/2 and 3 splits, so the order is 2·4/|image of ±1| = 4
        let (k, u, c) = setup("x^2+5");
        let m = Modulus::from_ideal(&k, &k.int_ideal(&BigInt::from(3)), vec![]).unwrap();
        let g = ray_class_group(&k, &m, &u, &c, 10_000).unwrap();
        assert_eq!(g.order(), BigInt::from(4));
        assert!(!g.generator_ideals.is_empty());
    }
}
