//! Conductors of prime-order ray class characters and the smallest root
//! discriminant among the cyclic extensions they cut out.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::interval::{root_interval, RatInterval};
use crate::exactalg::int_rat;
use crate::numfield::NumberField;

use super::modulus::Modulus;
use super::ray::RayClassGroup;

const ROOT_BITS: u64 = 64;

/// A character χ(x) = Σ a_i·x_i mod ℓ on the ray class group's invariant
/// coordinates, with its conductor and the root discriminant of its field.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterWitness {
    pub ell: u64,
    pub coefficients: Vec<u64>,
    pub conductor_exponents: Vec<u32>,
    pub conductor_real_places: Vec<usize>,
    pub conductor_norm: BigInt,
    /// |d_L| = |d_F|^ℓ · N(f)^{ℓ−1}.
    pub disc_abs: BigInt,
    pub root_discriminant: RatInterval,
}

/// Outcome of the minimum search over the cap.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MinRootDisc {
    /// Cl_cap has no quotient of order ℓ.
    None,
    Found {
        minimum: RatInterval,
        witness: CharacterWitness,
        characters: usize,
    },
}

impl MinRootDisc {
    pub fn minimum(&self) -> Option<&RatInterval> {
        match self {
            MinRootDisc::None => None,
            MinRootDisc::Found { minimum, .. } => Some(minimum),
        }
    }
}

/// Lower bound for δ_L over cyclic degree-ℓ extensions whose conductor
/// exponent at the i-th cap prime exceeds the cap: δ_F·N(P)^{(c+1)(ℓ−1)/(ℓn)}.
/// `None` when ℓ does not lie under that prime (tame: exponent ≤ 1 ≤ cap).
pub fn beyond_cap_bound(k: &NumberField, ell: u64, cap: &Modulus, i: usize) -> Option<RatInterval> {
    let (p, c) = &cap.factors[i];
    if p.p != ell {
        return None;
    }
    let n = k.degree() as u32;
    let x = k.disc().magnitude().pow(ell as u32) * p.norm().magnitude().pow((c + 1) * (ell as u32 - 1));
    Some(root_interval(&int_rat(&BigInt::from(x)), ell as u32 * n, ROOT_BITS))
}

/// Largest conductor exponent a cyclic degree-ℓ extension can have at a
/// prime P above ℓ: ⌊ℓ·e/(ℓ−1)⌋ + 1 with e = v_P(ℓ); 1 at tame primes.
pub fn max_conductor_exponent(ell: u64, p: u64, e: u32) -> u32 {
    if p == ell {
        (ell as u32 * e) / (ell as u32 - 1) + 1
    } else {
        1
    }
}

/// Every character of order ℓ of the ray class group, one per cyclic
/// subgroup (first nonzero coefficient 1), with conductor and discriminant.
/// Each conductor is found by lowering exponents (and dropping real places)
/// while the character still factors.
pub fn order_ell_characters(k: &NumberField, ell: u64, g: &RayClassGroup) -> Result<Vec<CharacterWitness>> {
    if !crate::exactalg::intfactor::is_prime_u64(ell) {
        return Err(Error::InvalidInput(format!("{ell} is not prime")));
    }
    let active: Vec<usize> = (0..g.invariants.len()).filter(|&i| (&g.invariants[i] % ell).is_zero()).collect();
    let n = k.degree() as u32;
    let mut kernels = KernelCache::new(g);
    let mut out = Vec::new();
    let total = (ell as usize).pow(active.len() as u32);
    for code in 1..total {
        let mut a = vec![0u64; g.invariants.len()];
        let mut c = code;
        for &i in &active {
            a[i] = (c % ell as usize) as u64;
            c /= ell as usize;
        }
        if a.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let chi = Character { a: &a, ell, inv: &g.invariants };
        let mut exps: Vec<u32> = g.modulus.factors.iter().map(|(_, e)| *e).collect();
        let mut places = g.modulus.real_places.clone();
        for i in 0..exps.len() {
            while exps[i] > 0 {
                let mut trial = exps.clone();
                trial[i] -= 1;
                if kernels.kills(k, &chi, &trial, &places) {
                    exps = trial;
                } else {
                    break;
                }
            }
        }
        for j in g.modulus.real_places.clone() {
            let trial: Vec<usize> = places.iter().copied().filter(|&x| x != j).collect();
            if kernels.kills(k, &chi, &exps, &trial) {
                places = trial;
            }
        }
        let norm: BigInt = g
            .modulus
            .factors
            .iter()
            .zip(&exps)
            .fold(BigInt::one(), |acc, ((p, _), e)| acc * p.norm().pow(*e));
        let disc_abs = BigInt::from(k.disc().magnitude().pow(ell as u32)) * norm.pow(ell as u32 - 1);
        let rd = root_interval(&int_rat(&disc_abs), ell as u32 * n, ROOT_BITS);
        out.push(CharacterWitness {
            ell,
            coefficients: a.clone(),
            conductor_exponents: exps,
            conductor_real_places: places,
            conductor_norm: norm,
            disc_abs,
            root_discriminant: rd,
        });
    }
    Ok(out)
}

/// Minimum root discriminant over the cyclic degree-ℓ extensions cut out by
/// characters of Cl_cap (a cyclic ℓ-power extension contains a degree-ℓ
/// layer of no larger root discriminant, so order ℓ suffices).
pub fn min_abelian_ext_rootdisc(k: &NumberField, ell: u64, g: &RayClassGroup) -> Result<MinRootDisc> {
    let chars = order_ell_characters(k, ell, g)?;
    let count = chars.len();
    let Some(witness) = chars.into_iter().min_by(|a, b| a.disc_abs.cmp(&b.disc_abs)) else {
        return Ok(MinRootDisc::None);
    };
    Ok(MinRootDisc::Found { minimum: witness.root_discriminant.clone(), witness, characters: count })
}

impl CharacterWitness {
    /// χ of a class given on the invariant generators, in Z/ℓ.
    pub fn eval(&self, class: &[BigInt]) -> u64 {
        let ell = BigInt::from(self.ell);
        let s: BigInt = self.coefficients.iter().zip(class).map(|(a, x)| x * a).sum();
        s.mod_floor(&ell).to_u64().expect("reduced")
    }
}

struct Character<'a> {
    a: &'a [u64],
    ell: u64,
    inv: &'a [BigInt],
}

impl Character<'_> {
    fn eval(&self, x: &[BigInt]) -> u64 {
        let ell = BigInt::from(self.ell);
        let mut s = BigInt::zero();
        for ((ai, xi), d) in self.a.iter().zip(x).zip(self.inv) {
            if *ai != 0 {
                debug_assert!((d % &ell).is_zero());
                s += xi * ai;
            }
        }
        s.mod_floor(&ell).to_u64().expect("reduced")
    }
}

/// Images in Cl_m of the kernels of Cl_m → Cl_m' for divisors m' of m,
/// generated by residues ≡ 1 mod m' and the signs at dropped places.
struct KernelCache<'g> {
    g: &'g RayClassGroup,
    cache: HashMap<(Vec<u32>, Vec<usize>), Vec<Vec<BigInt>>>,
}

impl<'g> KernelCache<'g> {
    fn new(g: &'g RayClassGroup) -> Self {
        KernelCache { g, cache: HashMap::new() }
    }

    fn kills(&mut self, k: &NumberField, chi: &Character, exps: &[u32], places: &[usize]) -> bool {
        let key = (exps.to_vec(), places.to_vec());
        if !self.cache.contains_key(&key) {
            let gens = self.kernel(k, exps, places);
            self.cache.insert(key.clone(), gens);
        }
        self.cache[&key].iter().all(|x| chi.eval(x) == 0)
    }

    fn kernel(&self, k: &NumberField, exps: &[u32], places: &[usize]) -> Vec<Vec<BigInt>> {
        let g = self.g;
        let factors = g.modulus.factors.iter().zip(exps).map(|((p, _), e)| (p.clone(), *e)).collect();
        let sub = Modulus::new(k, factors, places.to_vec()).expect("divisor of a valid modulus");
        let mut out: Vec<Vec<BigInt>> = Vec::new();
        let nsigns = g.modulus.real_places.len();
        let zero_signs = vec![BigInt::zero(); nsigns];
        let one = k.one().int_coords().expect("integral");
        for (r, log) in g.residues.table() {
            let diff: Vec<BigInt> = r.iter().zip(&one).map(|(x, y)| x - y).collect();
            if sub.finite_part.contains_int(&diff) {
                let c = g.dlog_residue(&log, &zero_signs);
                if c.iter().any(|x| !x.is_zero()) && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        for (i, j) in g.modulus.real_places.iter().enumerate() {
            if !places.contains(j) {
                out.push(g.dlog_sign(i));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfield::classgroup::class_group;
    use crate::classfield::ray::ray_class_group;
    use crate::classfield::units::unit_group;
    use crate::numfield::parse_field;

    fn min_over_q(n: i64, infinite: bool) -> MinRootDisc {
        let k = parse_field("x").unwrap();
        let u = unit_group(&k, None, None).unwrap();
        let c = class_group(&k, Some(&u), 1000).unwrap();
        let places = if infinite { vec![0] } else { vec![] };
        let m = Modulus::from_ideal(&k, &k.int_ideal(&BigInt::from(n)), places).unwrap();
        let g = ray_class_group(&k, &m, &u, &c, 1000).unwrap();
        min_abelian_ext_rootdisc(&k, 2, &g).unwrap()
    }

    #[test]
    fn rationals_cap_eight_infinity() {
        // quadratic fields of conductor dividing 8∞: Q(i) (4), Q(√2), Q(√−2) (8)
        let MinRootDisc::Found { minimum, witness, characters } = min_over_q(8, true) else { panic!() };
        assert_eq!(characters, 3);
        assert_eq!(witness.disc_abs, BigInt::from(4));
        assert!(minimum.contains(&crate::exactalg::rat(2)));
    }

    #[test]
    fn real_conductor_drops_infinity() {
        // mod 5∞ the only quadratic character is Q(√5), conductor 5 with no infinite part
        let MinRootDisc::Found { witness, .. } = min_over_q(5, true) else { panic!() };
        assert_eq!(witness.conductor_norm, BigInt::from(5));
        assert!(witness.conductor_real_places.is_empty());
        // mod 3 the character is Q(√−3), odd, so the place stays
        let MinRootDisc::Found { witness, .. } = min_over_q(3, true) else { panic!() };
        assert_eq!(witness.conductor_real_places, vec![0]);
        assert_eq!(witness.disc_abs, BigInt::from(3));
    }

    #[test]
    fn none_without_quotients() {
        let k = parse_field("x^2-x-3").unwrap();
        let u = unit_group(&k, None, None).unwrap();
        let c = class_group(&k, Some(&u), 1000).unwrap();
        let g = ray_class_group(&k, &Modulus::real_places_only(&k), &u, &c, 1000).unwrap();
        assert!(matches!(min_abelian_ext_rootdisc(&k, 2, &g).unwrap(), MinRootDisc::None));
    }

    #[test]
    fn wild_exponent_bounds() {
        assert_eq!(max_conductor_exponent(2, 2, 1), 3);
        assert_eq!(max_conductor_exponent(2, 2, 4), 9);
        assert_eq!(max_conductor_exponent(3, 3, 1), 2);
        assert_eq!(max_conductor_exponent(2, 5, 1), 1);
    }
}
