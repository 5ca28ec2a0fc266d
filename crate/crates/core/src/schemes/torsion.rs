//! The ℓ-torsion field T: a lower bound from Kummer layers and an upper bound
//! from the root-discriminant cap on every abelian layer above it.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bounds::{max_degree, FontaineBound, OdlyzkoTable};
use crate::classfield::classgroup::{class_group, ClassGroup};
use crate::classfield::conductor::{beyond_cap_bound, max_conductor_exponent};
use crate::classfield::units::{fixture_units_for, unit_group, UnitFixture, UnitGroup, UnitMode};
use crate::classfield::{min_abelian_ext_rootdisc, ray_class_group, MinRootDisc, Modulus};
use crate::error::{Error, Result};
use crate::exactalg::intfactor::factorize;
use crate::exactalg::RatInterval;
use crate::numfield::{adjoin_sqrt, Embedding, FieldElement, NumberField};

/// K(√u : u) for ℓ = 2, with the embedding of K and the classes that
/// actually enlarged the field.
#[derive(Clone, Debug)]
pub struct TorsionFieldLower {
    pub field: NumberField,
    pub base_degree: usize,
    pub base_embedding: Embedding,
    pub kummer_generators: Vec<FieldElement>,
}

impl TorsionFieldLower {
    pub fn index_over_base(&self) -> usize {
        self.field.degree() / self.base_degree
    }
}

/// Compositum of K(ζ_ℓ) and the Kummer fields of the given square classes.
/// Only ℓ = 2 is supported, where ζ_2 ∈ K and the layers are K(√u).
pub fn torsion_field_lower(k: &NumberField, ell: u64, square_classes: &[FieldElement]) -> Result<TorsionFieldLower> {
    if ell != 2 {
        return Err(Error::InvalidInput(format!("Kummer layers for ℓ = {ell} are not supported")));
    }
    let mut f = k.clone();
    let mut emb = Embedding::identity(k);
    let mut gens = Vec::new();
    for u in square_classes {
        if u.is_zero() || *u == k.one() {
            continue;
        }
        let image = emb.apply(k, &f, u);
        if let Some(ext) = adjoin_sqrt(&f, &image)? {
            emb = emb.then(&f, &ext.field, &ext.embedding);
            f = ext.field;
            gens.push(u.clone());
        }
    }
    Ok(TorsionFieldLower { field: f, base_degree: k.degree(), base_embedding: emb, kummer_generators: gens })
}

/// The cap modulus over F: every prime above ℓ to the given exponent, plus
/// all real places unless `wide_places`.
pub fn cap_modulus(f: &NumberField, ell: u64, exponent: u32, wide_places: bool) -> Result<Modulus> {
    let factors = f.factor_prime(ell)?.into_iter().map(|p| (p, exponent)).collect();
    let places = if wide_places { vec![] } else { (0..f.signature().0).collect() };
    Modulus::new(f, factors, places)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorsionStatus {
    Certified,
    LowerOnly,
}

/// Search for cyclic layers of prime degree q over F inside the capped ray
/// class field, and whether the cap provably covers every such layer.
#[derive(Clone, Debug, Serialize)]
pub struct LayerSearch {
    pub degree: u64,
    pub result: MinRootDisc,
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionFieldCertificate {
    pub field: String,
    pub degree: usize,
    pub index_over_base: usize,
    pub kummer_generators: Vec<FieldElement>,
    pub root_discriminant: RatInterval,
    pub fontaine_bound: RatInterval,
    pub degree_cap: u32,
    pub cap_exponents: Vec<u32>,
    pub cap_real_places: Vec<usize>,
    pub unit_mode: Option<UnitMode>,
    pub ray_invariants: Vec<String>,
    pub layers: Vec<LayerSearch>,
    pub status: TorsionStatus,
    pub reason: Option<String>,
    #[serde(skip)]
    pub number_field: NumberField,
}

impl TorsionFieldCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == TorsionStatus::Certified
    }
}

/// Units and class group of F, from fixtures when F is not quadratic.
pub fn arithmetic_of(f: &NumberField, fixtures: &[UnitFixture], search_cap: usize) -> Result<(UnitGroup, ClassGroup)> {
    let (r1, r2) = f.signature();
    let u = if f.degree() <= 2 || r1 + r2 == 1 {
        unit_group(f, None, None)?
    } else {
        let (units, reg) = fixture_units_for(f, fixtures)?
            .ok_or_else(|| Error::Precondition(format!("no unit fixture for {}", f.poly())))?;
        unit_group(f, Some(&units), Some(&reg))?
    };
    let c = class_group(f, Some(&u), search_cap)?;
    Ok((u, c))
}

/// Certifies T = F0: F0 satisfies the root-discriminant bound and degree cap,
/// and every cyclic layer of prime degree over F0 unramified outside ℓ and
/// the places in the cap (which the cap provably covers) violates the bound,
/// so F0 has no abelian extension inside T. Class-field failures leave the
/// lower bound standing (`LowerOnly`); a lower bound already violating the
/// bound is an error.
pub fn certify_torsion_field(
    lower: &TorsionFieldLower,
    ell: u64,
    fb: &FontaineBound,
    table: &OdlyzkoTable,
    cap: &Modulus,
    fixtures: &[UnitFixture],
    search_cap: usize,
) -> Result<TorsionFieldCertificate> {
    let f = &lower.field;
    let rd = f.root_discriminant();
    if rd.lo >= fb.value.hi {
        return Err(Error::Precondition(format!(
            "lower torsion field {} has root discriminant {} above the bound {}",
            f.poly(),
            rd.to_decimal(6),
            fb.value.to_decimal(6)
        )));
    }
    let degree_cap = max_degree(table, &fb.value)?;
    let mut cert = TorsionFieldCertificate {
        field: f.poly().to_string(),
        degree: f.degree(),
        index_over_base: lower.index_over_base(),
        kummer_generators: lower.kummer_generators.clone(),
        root_discriminant: rd.clone(),
        fontaine_bound: fb.value.clone(),
        degree_cap,
        cap_exponents: cap.factors.iter().map(|(_, e)| *e).collect(),
        cap_real_places: cap.real_places.clone(),
        unit_mode: None,
        ray_invariants: vec![],
        layers: vec![],
        status: TorsionStatus::LowerOnly,
        reason: None,
        number_field: f.clone(),
    };
    if rd.hi >= fb.value.lo {
        cert.reason = Some("root discriminant of the lower field not separated from the bound".into());
        return Ok(cert);
    }
    if f.degree() as u32 > degree_cap {
        cert.reason = Some(format!("degree {} exceeds the cap {degree_cap}", f.degree()));
        return Ok(cert);
    }
    let (units, cl) = match arithmetic_of(f, fixtures, search_cap) {
        Ok(x) => x,
        Err(e) => {
            cert.reason = Some(format!("unit or class group of the lower field: {e}"));
            return Ok(cert);
        }
    };
    cert.unit_mode = Some(units.mode);
    let ray = match ray_class_group(f, cap, &units, &cl, search_cap) {
        Ok(r) => r,
        Err(e) => {
            cert.reason = Some(format!("ray class group of the cap: {e}"));
            return Ok(cert);
        }
    };
    cert.ray_invariants = ray.invariants.iter().map(|x| x.to_string()).collect();
    let mut failures = Vec::new();
    for q in factorize(&ray.order()).into_keys() {
        let q = q.to_u64().ok_or_else(|| Error::Inconclusive("ray class group order has a huge prime".into()))?;
        let result = min_abelian_ext_rootdisc(f, q, &ray)?;
        let complete = cap.factors.iter().enumerate().all(|(i, (p, c))| {
            *c >= max_conductor_exponent(q, p.p, p.e)
                || beyond_cap_bound(f, q, cap, i).is_some_and(|b| b.lo > fb.value.hi)
        });
        if !complete {
            failures.push(format!("the cap does not cover every degree-{q} conductor"));
        }
        if let Some(m) = result.minimum() {
            if m.lo <= fb.value.hi {
                failures.push(format!(
                    "a degree-{q} layer has root discriminant {} within the bound",
                    m.to_decimal(6)
                ));
            }
        }
        cert.layers.push(LayerSearch { degree: q, result, complete });
    }
    if !cap.factors.iter().any(|(p, _)| p.p == ell) {
        failures.push(format!("the cap has no prime above {ell}"));
    }
    if failures.is_empty() {
        cert.status = TorsionStatus::Certified;
    } else {
        cert.reason = Some(failures.join("; "));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::fontaine_bound;
    use crate::classfield::kummer::s_unit_square_classes;
    use crate::numfield::{parse_field, quadratic_field};

    fn table() -> OdlyzkoTable {
        OdlyzkoTable::parse(include_str!("../../../../data/odlyzko.csv")).unwrap()
    }

    fn lower_for(k: &NumberField) -> TorsionFieldLower {
        let u = unit_group(k, None, None).unwrap();
        let c = class_group(k, Some(&u), 100_000).unwrap();
        let classes = s_unit_square_classes(k, &[], &u, &c, 100_000).unwrap();
        torsion_field_lower(k, 2, &classes).unwrap()
    }

    #[test]
    fn rationals_give_gaussian_field() {
        let q = parse_field("x").unwrap();
        let l = lower_for(&q);
        assert_eq!(l.field.degree(), 2);
        assert_eq!(l.field.disc(), &num_bigint::BigInt::from(-4));
        // the trivial class adds nothing
        assert_eq!(torsion_field_lower(&q, 2, &[q.one()]).unwrap().field.degree(), 1);
        assert!(torsion_field_lower(&q, 3, &[]).is_err());
    }

    #[test]
    fn sqrt13_lower_field_is_the_octic() {
        let k = quadratic_field(13).unwrap();
        let l = lower_for(&k);
        assert_eq!(l.field.degree(), 8);
        assert_eq!(l.index_over_base(), 4);
        // −1 and η enlarge the field; −η is then a square
        assert_eq!(l.kummer_generators.len(), 2);
        let fixtures = crate::classfield::parse_unit_fixtures(include_str!("../../../../data/units.fixture")).unwrap();
        assert!(fixture_units_for(&l.field, &fixtures).unwrap().is_some());
        // the embedding of K is a field homomorphism
        let t = k.theta();
        let img = l.base_embedding.apply(&k, &l.field, &t);
        assert_eq!(l.field.mul(&img, &img), l.base_embedding.apply(&k, &l.field, &k.mul(&t, &t)));
    }

    #[test]
    fn gaussian_field_over_rationals_is_recorded() {
        let q = parse_field("x").unwrap();
        let l = lower_for(&q);
        let fb = fontaine_bound(&q, 2).unwrap();
        let cap = cap_modulus(&l.field, 2, 3, false).unwrap();
        let cert = certify_torsion_field(&l, 2, &fb, &table(), &cap, &[], 100_000).unwrap();
        // δ(Q(i)) = 2 < 4; recorded whichever way the layer search goes
        assert!(cert.root_discriminant.hi < fb.value.lo);
        assert_eq!(cert.degree_cap, 5);
        eprintln!("Q(i) over Q: {:?} {:?}", cert.status, cert.reason);
    }

    #[test]
    fn lower_field_beyond_the_bound_is_an_error() {
        // the octic over Q(√13) measured against the bound for Q
        let k = quadratic_field(13).unwrap();
        let l = lower_for(&k);
        let q = parse_field("x").unwrap();
        let fb = fontaine_bound(&q, 2).unwrap();
        let cap = cap_modulus(&l.field, 2, 6, false).unwrap();
        assert!(matches!(
            certify_torsion_field(&l, 2, &fb, &table(), &cap, &[], 100_000),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn missing_fixture_leaves_the_lower_bound() {
        let k = quadratic_field(13).unwrap();
        let l = lower_for(&k);
        let fb = fontaine_bound(&k, 2).unwrap();
        let cap = cap_modulus(&l.field, 2, 6, false).unwrap();
        let cert = certify_torsion_field(&l, 2, &fb, &table(), &cap, &[], 100_000).unwrap();
        assert_eq!(cert.status, TorsionStatus::LowerOnly);
        assert!(cert.reason.unwrap().contains("fixture"));
    }
}
