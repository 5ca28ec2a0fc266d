//! Square classes of S-units: the Kummer generators of quadratic extensions
//! unramified outside S and 2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactalg::matrix::{hnf_basis, IntMatrix};
use crate::numfield::{FieldElement, NumberField, PrimeIdeal};

use super::classgroup::{principal_generator, ClassGroup};
use super::units::UnitGroup;

/// Generators of O_S* modulo torsion-free squares: a root of unity of even
/// order, the fundamental units, then generators of the principal products
/// of S-primes (a basis of the kernel of Z^S → Cl).
pub fn s_unit_generators(
    k: &NumberField,
    s: &[PrimeIdeal],
    units: &UnitGroup,
    cl: &ClassGroup,
    cap: usize,
) -> Result<Vec<FieldElement>> {
    let mut gens = vec![units.torsion_generator.clone()];
    gens.extend(units.fundamental_units.iter().cloned());
    if s.is_empty() {
        return Ok(gens);
    }
    let t = s.len();
    let classes: Vec<Vec<BigInt>> =
        s.iter().map(|p| cl.class_of(k, &p.ideal, units, cap)).collect::<Result<_>>()?;
    let e = cl.invariants.iter().fold(BigInt::from(1), |a, d| a.lcm(d)).to_u32().expect("small class group");
    let mut kernel: Vec<Vec<BigInt>> =
        (0..t).map(|i| (0..t).map(|j| BigInt::from(if i == j { e } else { 0 })).collect()).collect();
    if e > 1 {
        let mut q = vec![0u32; t];
        'odo: loop {
            let zero = cl.invariants.iter().enumerate().all(|(i, d)| {
                let v: BigInt = classes.iter().zip(&q).map(|(c, &x)| &c[i] * x).sum();
                v.mod_floor(d).is_zero()
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
    }
    for b in hnf_basis(&IntMatrix::from_big_rows(kernel, t)).to_rows() {
        let mut j = k.unit_ideal();
        for (p, x) in s.iter().zip(&b) {
            j = k.ideal_mul(&j, &k.ideal_pow(&p.ideal, x.to_u32().expect("nonnegative HNF row")));
        }
        let g = principal_generator(k, &j, Some(units), cap)?
            .ok_or_else(|| Error::Precondition("product of S-primes expected principal is not".into()))?;
        gens.push(g);
    }
    Ok(gens)
}

/// Representatives of O_S*/(O_S*)²: all products of subsets of the S-unit
/// generators, in binary order (bit i selects generator i).
pub fn s_unit_square_classes(
    k: &NumberField,
    s: &[PrimeIdeal],
    units: &UnitGroup,
    cl: &ClassGroup,
    cap: usize,
) -> Result<Vec<FieldElement>> {
    if units.torsion_order % 2 != 0 {
        return Err(Error::Precondition("torsion of odd order".into()));
    }
    let gens = s_unit_generators(k, s, units, cl, cap)?;
    if gens.len() > 16 {
        return Err(Error::Inconclusive(format!("{} square-class generators", gens.len())));
    }
    let mut out = Vec::with_capacity(1 << gens.len());
    for mask in 0u32..(1 << gens.len()) {
        let mut x = k.one();
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                x = k.mul(&x, g);
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// Whether a nonzero element is a square in K.
pub fn is_square(k: &NumberField, a: &FieldElement) -> Result<bool> {
    if a.is_zero() {
        return Ok(true);
    }
    Ok(k.sqrt(a)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfield::classgroup::class_group;
    use crate::classfield::units::unit_group;
    use crate::exactalg::rat;
    use crate::numfield::parse_field;

    fn setup(poly: &str) -> (NumberField, UnitGroup, ClassGroup) {
        let k = parse_field(poly).unwrap();
        let u = unit_group(&k, None, None).unwrap();
        let c = class_group(&k, Some(&u), 10_000).unwrap();
        (k, u, c)
    }

    #[test]
    fn sqrt13_units() {
        let k = crate::numfield::quadratic_field(13).unwrap();
        let u = unit_group(&k, None, None).unwrap();
        let c = class_group(&k, Some(&u), 10_000).unwrap();
        let classes = s_unit_square_classes(&k, &[], &u, &c, 10_000).unwrap();
        assert_eq!(classes.len(), 4);
        assert_eq!(classes[1], k.from_int(-1));
        // η = (3 + √13)/2
        let parts = |x| crate::numfield::quadratic::quadratic_parts(&k, 13, x).unwrap();
        assert_eq!(parts(&classes[2]), (rat(3) / rat(2), rat(1) / rat(2)));
        assert_eq!(parts(&classes[3]), (rat(-3) / rat(2), rat(-1) / rat(2)));
    }

    #[test]
    fn rationals() {
        let (k, u, c) = setup("x");
        let none = s_unit_square_classes(&k, &[], &u, &c, 100).unwrap();
        assert_eq!(none, vec![k.one(), k.from_int(-1)]);
        let s = k.factor_prime(2).unwrap();
        let two = s_unit_square_classes(&k, &s, &u, &c, 100).unwrap();
        let vals: Vec<_> = two.iter().map(|x| k.to_power_coords(x)[0].clone()).collect();
        assert_eq!(vals, vec![rat(1), rat(-1), rat(2), rat(-2)]);
    }

    #[test]
    fn classes_are_distinct_mod_squares() {
        let (k, u, c) = setup("x^2+5");
        let s = k.factor_prime(2).unwrap();
        let classes = s_unit_square_classes(&k, &s, &u, &c, 10_000).unwrap();
        assert_eq!(classes.len(), 4);
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let q = k.mul(&classes[i], &classes[j]);
                assert!(!is_square(&k, &q).unwrap(), "{i} {j}");
            }
        }
    }
}
