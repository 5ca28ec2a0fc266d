use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::interval::{root_interval, RatInterval};
use crate::exactalg::intfactor::is_prime_u64;
use crate::exactalg::int_rat;
use crate::numfield::NumberField;

use super::constants::{FONTAINE_EXPONENT_DENOMINATOR_OFFSET, FONTAINE_EXPONENT_NUMERATOR, ROOT_BITS};

#[derive(Clone, Debug, Serialize)]
pub struct FontaineBound {
    pub field: String,
    pub ell: u64,
    pub root_discriminant: RatInterval,
    pub value: RatInterval,
}

/// ℓ^(1 + a/(ℓ−b)) as a certified interval, with a, b from the constants file.
pub fn ell_factor(ell: u64) -> RatInterval {
    let den = ell as u32 - FONTAINE_EXPONENT_DENOMINATOR_OFFSET;
    // ℓ^((den + a)/den) = (ℓ^(den + a))^(1/den)
    let x = BigInt::from(ell).pow(den + FONTAINE_EXPONENT_NUMERATOR);
    root_interval(&int_rat(&x), den, ROOT_BITS)
}

/// δ_K · ℓ^(1+1/(ℓ−1)); requires ℓ unramified in K.
pub fn fontaine_bound(k: &NumberField, ell: u64) -> Result<FontaineBound> {
    if !is_prime_u64(ell) {
        return Err(Error::InvalidInput(format!("{ell} is not prime")));
    }
    if (k.disc() % BigInt::from(ell)).is_zero() {
        return Err(Error::Precondition(format!("{ell} is ramified in the base field")));
    }
    let rd = k.root_discriminant();
    let value = rd.mul(&ell_factor(ell));
    Ok(FontaineBound { field: k.poly().to_string(), ell, root_discriminant: rd, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::numfield::parse_field;

    fn dec(s: &str) -> num_rational::BigRational {
        crate::classfield::units::parse_decimal(s).unwrap()
    }

    #[test]
    fn sqrt13_gives_four_root_thirteen() {
        let b = fontaine_bound(&parse_field("x^2-13").unwrap(), 2).unwrap();
        assert!(b.value.lo >= dec("14.4222") && b.value.hi <= dec("14.4223"));
        assert!(b.value.width() < dec("0.001"));
        // (4√13)² = 208
        assert!(b.value.lo.pow(2) <= rat(208) && b.value.hi.pow(2) >= rat(208));
    }

    #[test]
    fn rationals() {
        let q = parse_field("x").unwrap();
        let two = fontaine_bound(&q, 2).unwrap();
        assert_eq!(two.value, RatInterval::from_int(4));
        let three = fontaine_bound(&q, 3).unwrap();
        // 3^(3/2)² = 27
        assert!(three.value.lo.pow(2) <= rat(27) && three.value.hi.pow(2) >= rat(27));
        assert!(three.value.lo > dec("5.196152") && three.value.hi < dec("5.196153"));
    }

    #[test]
    fn ramified_prime_rejected() {
        assert!(fontaine_bound(&parse_field("x^2+1").unwrap(), 2).is_err());
        assert!(fontaine_bound(&parse_field("x^2-17").unwrap(), 2).is_ok());
        assert!(fontaine_bound(&parse_field("x^2-13").unwrap(), 13).is_err());
    }
}
