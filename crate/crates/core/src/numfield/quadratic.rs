//! Real quadratic fast paths: construction and fundamental units by continued fractions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::intfactor::is_squarefree;
use crate::exactalg::poly::{int_rat, QPoly};

use super::field::{make_field, FieldElement, NumberField};

/// Q(√d) for squarefree d ≠ 0, 1, defined by x² − d.
pub fn quadratic_field(d: i64) -> Result<NumberField> {
    if d == 0 || d == 1 || !is_squarefree(&BigInt::from(d)) {
        return Err(Error::InvalidInput(format!("{d} is not a squarefree integer other than 0, 1")));
    }
    make_field(&QPoly::from_ints(&[-d, 0, 1]))
}

/// The square root of d inside a quadratic field, positive at the first embedding.
pub fn sqrt_of_d(k: &NumberField, d: i64) -> Result<FieldElement> {
    let s = k
        .sqrt(&k.from_int(d))?
        .ok_or_else(|| Error::InvalidInput(format!("{d} is not a square in the field")))?;
    Ok(if k.embed_f64(&s, 0).0 > 0.0 { s } else { k.neg(&s) })
}

/// The squarefree d with K = Q(√d), read off the discriminant.
pub fn quadratic_radicand(k: &NumberField) -> Result<i64> {
    if k.degree() != 2 {
        return Err(Error::InvalidInput("not a quadratic field".into()));
    }
    let disc: i64 = k.disc().try_into().map_err(|_| Error::InvalidInput("discriminant too large".into()))?;
    Ok(if disc.rem_euclid(4) == 0 { disc / 4 } else { disc })
}

/// Continued-fraction data for ω = (1+√d)/2 (d ≡ 1 mod 4) or ω = √d:
/// the first convergent p/q with N(p − qω) = ±1.
fn unit_convergent(d: i64) -> (BigInt, BigInt, bool) {
    let db = BigInt::from(d);
    let half = d.rem_euclid(4) == 1;
    let root = db.sqrt();
    let (mut pp, mut qq) = if half { (BigInt::one(), BigInt::from(2)) } else { (BigInt::zero(), BigInt::one()) };
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    let norm = |p: &BigInt, q: &BigInt| -> BigInt {
        if half {
            p * p - p * q - q * q * BigInt::from((d - 1) / 4)
        } else {
            p * p - &db * q * q
        }
    };
    loop {
        let a = (&pp + &root).div_floor(&qq);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        if norm(&p, &q).abs().is_one() {
            return (p, q, half);
        }
        pp = &a * &qq - &pp;
        qq = (&db - &pp * &pp) / &qq;
    }
}

/// Fundamental unit ε > 1 (at the first embedding) of a real quadratic field.
/// The continued fraction of the ring generator reaches the smallest unit
/// first, so the first convergent of norm ±1 certifies minimality.
pub fn fundamental_unit_quadratic(k: &NumberField) -> Result<FieldElement> {
    let (r1, _) = k.signature();
    let d = quadratic_radicand(k)?;
    if r1 != 2 || d <= 1 {
        return Err(Error::InvalidInput("fundamental unit requires a real quadratic field".into()));
    }
    let (p, q, half) = unit_convergent(d);
    let s = sqrt_of_d(k, d)?;
    // conjugate of p − qω, which is the unit larger than 1
    let (a, b) = if half {
        (BigRational::new(BigInt::from(2) * &p - &q, BigInt::from(2)), BigRational::new(q, BigInt::from(2)))
    } else {
        (int_rat(&p), int_rat(&q))
    };
    let eps = k.add(&k.from_rational(a), &k.scale(&s, &b));
    debug_assert!(k.is_unit(&eps));
    Ok(eps)
}

/// Convenience: (Q(√d), ε) for squarefree d > 1.
pub fn real_quadratic_unit(d: i64) -> Result<(NumberField, FieldElement)> {
    if d <= 1 {
        return Err(Error::InvalidInput(format!("{d} must exceed 1")));
    }
    let k = quadratic_field(d)?;
    let e = fundamental_unit_quadratic(&k)?;
    Ok((k, e))
}

/// (a, b) with x = a + b√d, for x in a quadratic field.
pub fn quadratic_parts(k: &NumberField, d: i64, x: &FieldElement) -> Result<(BigRational, BigRational)> {
    let s = sqrt_of_d(k, d)?;
    let tr_x = k.trace(x);
    let tr_xs = k.trace(&k.mul(x, &s));
    let two = int_rat(&BigInt::from(2));
    let a = &tr_x / &two;
    let b = &tr_xs / (&two * int_rat(&BigInt::from(d)));
    if !k.sub(x, &k.add(&k.from_rational(a.clone()), &k.scale(&s, &b))).is_zero() {
        return Err(Error::InvalidInput("element not in Q(√d)".into()));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::rat;

    fn parts(d: i64) -> (BigRational, BigRational, BigRational) {
        let (k, e) = real_quadratic_unit(d).unwrap();
        let (a, b) = quadratic_parts(&k, d, &e).unwrap();
        (a, b, k.norm(&e))
    }

    #[test]
    fn known_units() {
        let half = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(parts(13), (half, BigRational::new(BigInt::one(), BigInt::from(2)), rat(-1)));
        assert_eq!(parts(17), (rat(4), rat(1), rat(-1)));
        assert_eq!(parts(2), (rat(1), rat(1), rat(-1)));
        assert_eq!(parts(3), (rat(2), rat(1), rat(1)));
        assert_eq!(parts(5), (rat(1) / rat(2), rat(1) / rat(2), rat(-1)));
    }

    #[test]
    fn rejects_bad_radicands() {
        assert!(real_quadratic_unit(1).is_err());
        assert!(real_quadratic_unit(12).is_err());
        assert!(real_quadratic_unit(-5).is_err());
        assert!(quadratic_field(4).is_err());
    }

    #[test]
    fn radicand_from_discriminant() {
        for d in [2, 3, 5, 13, 17, -1, -5, -3] {
            let k = quadratic_field(d).unwrap();
            assert_eq!(quadratic_radicand(&k).unwrap(), d);
        }
    }
}
