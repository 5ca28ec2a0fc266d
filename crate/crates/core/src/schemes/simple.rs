//! Simple group schemes of order ℓ over O_K: one Oort–Tate scheme G_{a,b}
//! for each principal divisor (a) of (ℓ), with ab = ℓ.

use std::fmt;

use serde::Serialize;

use crate::classfield::classgroup::{principal_generator, ClassGroup};
use crate::classfield::units::UnitGroup;
use crate::error::{Error, Result};
use crate::exactalg::intfactor::is_prime_u64;
use crate::numfield::{adjoin_sqrt, FieldElement, NumberField, PrimeIdeal};

/// Range of unit exponents tried when choosing a canonical generator.
const UNIT_EXPONENT_RANGE: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Z/ℓZ: a is a unit.
    Etale,
    /// μ_ℓ: b is a unit.
    Multiplicative,
    OortTate { a: FieldElement, b: FieldElement },
}

impl SchemeKind {
    pub fn is_etale(&self) -> bool {
        matches!(self, SchemeKind::Etale)
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(self, SchemeKind::Multiplicative)
    }
}

#[derive(Clone, Serialize)]
pub struct SimpleScheme {
    pub label: String,
    pub kind: SchemeKind,
    pub order: u64,
    /// Parameters (a, b) with ab = ℓ, for every kind.
    pub a: FieldElement,
    pub b: FieldElement,
    /// Defining polynomial of the field of points K(J).
    pub points_field: String,
    pub points_degree: usize,
    pub dual_label: String,
    #[serde(skip)]
    pub points: NumberField,
}

impl fmt::Debug for SimpleScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dual {}, a = {}, K(J) = {})", self.label, self.dual_label, self.a, self.points_field)
    }
}

pub fn etale_label(ell: u64) -> String {
    format!("Z/{ell}Z")
}

pub fn multiplicative_label(ell: u64) -> String {
    format!("mu_{ell}")
}

/// Names of the primes above ℓ: π and π̄ for two primes, P1, P2, … otherwise.
fn prime_names(r: usize) -> Vec<String> {
    if r == 2 {
        vec!["pi".into(), "pibar".into()]
    } else {
        (1..=r).map(|i| format!("P{i}")).collect()
    }
}

fn divisor_label(mask: usize, r: usize, ell: u64) -> String {
    if mask == 0 {
        return etale_label(ell);
    }
    if mask == (1 << r) - 1 {
        return multiplicative_label(ell);
    }
    let names = prime_names(r);
    let parts: Vec<&str> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| names[i].as_str()).collect();
    format!("G_{}", parts.join("*"))
}

/// Field of points of x^ℓ = a·x: K itself for ℓ = 2 (roots 0 and a),
/// K(ζ_3) for μ_3 and K(√a) for the other order-3 schemes.
fn points_field(k: &NumberField, ell: u64, kind: &SchemeKind, a: &FieldElement) -> Result<NumberField> {
    match ell {
        2 => Ok(k.clone()),
        3 => {
            let radicand = match kind {
                SchemeKind::Etale => return Ok(k.clone()),
                SchemeKind::Multiplicative => k.from_int(-3),
                SchemeKind::OortTate { .. } => a.clone(),
            };
            Ok(adjoin_sqrt(k, &radicand)?.map_or_else(|| k.clone(), |e| e.field))
        }
        _ => Err(Error::InvalidInput(format!("fields of points for ℓ = {ell} are not supported"))),
    }
}

fn make(k: &NumberField, ell: u64, label: String, dual_label: String, kind: SchemeKind, a: FieldElement) -> Result<SimpleScheme> {
    let b = k.div(&k.from_int(ell as i64), &a)?;
    let points = points_field(k, ell, &kind, &a)?;
    Ok(SimpleScheme {
        label,
        kind,
        order: ell,
        a,
        b,
        points_field: points.poly().to_string(),
        points_degree: points.degree(),
        dual_label,
        points,
    })
}

/// Representative of a·u^(ℓ−1) of least height, over small unit exponents.
fn canonical_generator(k: &NumberField, a: &FieldElement, units: &UnitGroup, ell: u64) -> Result<FieldElement> {
    let e = ell as i64 - 1;
    let mut cands = vec![a.clone()];
    let zeta_power = k.pow(&units.torsion_generator, e)?;
    for _ in 1..units.torsion_order {
        let last = cands.last().expect("nonempty").clone();
        cands.push(k.mul(&last, &zeta_power));
    }
    for u in &units.fundamental_units {
        let mut next = Vec::new();
        for c in &cands {
            for t in -UNIT_EXPONENT_RANGE..=UNIT_EXPONENT_RANGE {
                next.push(k.mul(c, &k.pow(u, t * e)?));
            }
        }
        cands = next;
    }
    Ok(cands
        .into_iter()
        .min_by(|x, y| (x.height(), x.to_string()).cmp(&(y.height(), y.to_string())))
        .expect("nonempty"))
}

/// The simple order-ℓ schemes over O_K[1/S]: the principal divisors of (ℓ)
/// in bitmask order over the primes above ℓ, (1) étale and (ℓ) multiplicative.
/// A divisor and its complement share one generator, so duality is exact.
pub fn oort_tate_simples(
    k: &NumberField,
    s: &[PrimeIdeal],
    ell: u64,
    cl: &ClassGroup,
    units: &UnitGroup,
    cap: usize,
) -> Result<Vec<SimpleScheme>> {
    if !is_prime_u64(ell) {
        return Err(Error::InvalidInput(format!("{ell} is not prime")));
    }
    if num_traits::Zero::is_zero(&(k.disc() % ell)) {
        return Err(Error::Precondition(format!("{ell} is ramified in the base field")));
    }
    if s.iter().any(|p| p.p == ell) {
        return Err(Error::Precondition(format!("{ell} lies below a prime of S")));
    }
    let primes = k.factor_prime(ell)?;
    let r = primes.len();
    let full = (1usize << r) - 1;
    let mut gens: Vec<Option<FieldElement>> = vec![None; full + 1];
    for mask in 0..=full {
        let a = if mask == 0 {
            Some(k.one())
        } else if mask == full {
            Some(k.from_int(ell as i64))
        } else if let Some(c) = &gens[full ^ mask] {
            Some(k.div(&k.from_int(ell as i64), c)?)
        } else {
            let mut d = k.unit_ideal();
            for (i, p) in primes.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    d = k.ideal_mul(&d, &p.ideal);
                }
            }
            let label = divisor_label(mask, r, ell);
            let class = cl
                .class_of(k, &d, units, cap)
                .map_err(|e| Error::Inconclusive(format!("principality of the divisor of {label}: {e}")))?;
            if class.iter().any(|x| !num_traits::Zero::is_zero(x)) {
                None
            } else {
                let g = principal_generator(k, &d, Some(units), cap)
                    .map_err(|e| Error::Inconclusive(format!("generator of the divisor of {label}: {e}")))?
                    .ok_or_else(|| Error::Inconclusive(format!("divisor of {label} has trivial class but no generator")))?;
                Some(canonical_generator(k, &g, units, ell)?)
            }
        };
        gens[mask] = a;
    }
    let mut out = Vec::new();
    for (mask, a) in gens.into_iter().enumerate() {
        let Some(a) = a else { continue };
        let kind = if mask == 0 {
            SchemeKind::Etale
        } else if mask == full {
            SchemeKind::Multiplicative
        } else {
            let b = k.div(&k.from_int(ell as i64), &a)?;
            SchemeKind::OortTate { a: a.clone(), b }
        };
        out.push(make(k, ell, divisor_label(mask, r, ell), divisor_label(full ^ mask, r, ell), kind, a)?);
    }
    Ok(out)
}

/// J ↦ Hom(J, G_m): étale and multiplicative swap, G_{a,b} ↦ G_{b,a}.
pub fn cartier_dual(k: &NumberField, s: &SimpleScheme) -> Result<SimpleScheme> {
    let kind = match &s.kind {
        SchemeKind::Etale => SchemeKind::Multiplicative,
        SchemeKind::Multiplicative => SchemeKind::Etale,
        SchemeKind::OortTate { a, b } => SchemeKind::OortTate { a: b.clone(), b: a.clone() },
    };
    make(k, s.order, s.dual_label.clone(), s.label.clone(), kind, s.b.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfield::classgroup::class_group;
    use crate::classfield::units::unit_group;
    use crate::numfield::quadratic_field;
    use num_traits::Signed;

    fn simples(d: i64, ell: u64) -> (NumberField, Vec<SimpleScheme>) {
        let k = if d == 1 { crate::numfield::parse_field("x").unwrap() } else { quadratic_field(d).unwrap() };
        let u = unit_group(&k, None, None).unwrap();
        let c = class_group(&k, Some(&u), 100_000).unwrap();
        let s = oort_tate_simples(&k, &[], ell, &c, &u, 100_000).unwrap();
        (k, s)
    }

    fn labels(s: &[SimpleScheme]) -> Vec<&str> {
        s.iter().map(|x| x.label.as_str()).collect()
    }

    #[test]
    fn inert_and_rational_cases() {
        assert_eq!(labels(&simples(13, 2).1), vec!["Z/2Z", "mu_2"]);
        assert_eq!(labels(&simples(1, 2).1), vec!["Z/2Z", "mu_2"]);
    }

    #[test]
    fn split_two_in_sqrt17() {
        let (k, s) = simples(17, 2);
        assert_eq!(labels(&s), vec!["Z/2Z", "G_pi", "G_pibar", "mu_2"]);
        for x in &s {
            assert_eq!(k.mul(&x.a, &x.b), k.from_int(2));
            assert!(x.a.is_integral() && x.b.is_integral());
            assert_eq!(x.points_degree, 2);
        }
        // π is a generator of norm ±2
        assert_eq!(k.norm(&s[1].a).abs(), crate::exactalg::rat(2));
    }

    #[test]
    fn duality_is_an_involution_and_closes_the_list() {
        for d in [13, 17, 1, -7, -15] {
            let (k, s) = simples(d, 2);
            for x in &s {
                let y = cartier_dual(&k, x).unwrap();
                assert!(s.iter().any(|z| z.label == y.label && z.a == y.a && z.kind == y.kind), "{d}: {x:?}");
                let z = cartier_dual(&k, &y).unwrap();
                assert_eq!((z.label.as_str(), &z.a, &z.kind), (x.label.as_str(), &x.a, &x.kind));
            }
            assert_eq!(cartier_dual(&k, &s[0]).unwrap().label, "mu_2");
        }
    }

    #[test]
    fn count_matches_principal_divisors() {
        // Q(√−5): 2 ramifies; 3 splits into non-principal primes
        let k = quadratic_field(-5).unwrap();
        let u = unit_group(&k, None, None).unwrap();
        let c = class_group(&k, Some(&u), 100_000).unwrap();
        assert!(oort_tate_simples(&k, &[], 5, &c, &u, 100_000).is_err());
        let s = oort_tate_simples(&k, &[], 3, &c, &u, 100_000).unwrap();
        assert_eq!(labels(&s), vec!["Z/3Z", "mu_3"]);
        // μ_3 has its points over K(ζ_3)
        assert_eq!(s[1].points_degree, 4);
        assert_eq!(s[0].points_degree, 2);
        // Q(√−7): 2 splits into principal primes
        assert_eq!(simples(-7, 2).1.len(), 4);
        // Q(√−15): 2 splits into non-principal primes
        assert_eq!(labels(&simples(-15, 2).1), vec!["Z/2Z", "mu_2"]);
    }
}
