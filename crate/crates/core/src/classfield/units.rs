//! Unit groups: computed for quadratic fields, verified from fixtures otherwise.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::fp::powmod;
use crate::exactalg::interval::RatInterval;
use crate::exactalg::intfactor::{is_prime_u64, primes_up_to};
use crate::exactalg::linalg::fp_rank;
use crate::exactalg::poly::{rat, QPoly};
use crate::numfield::{fundamental_unit_quadratic, FieldElement, NumberField};

use super::enumerate::short_elements;

/// Every number field has regulator above this (Friedman's bound is ≈ 0.2052).
pub const REGULATOR_LOWER_BOUND: (i64, i64) = (1, 5);
const LOG_BITS: u64 = 96;
/// Largest auxiliary prime tried when certifying p-saturation.
const SATURATION_PRIME_LIMIT: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitMode {
    Computed,
    CertifiedFixture,
}

impl fmt::Display for UnitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitMode::Computed => "computed",
            UnitMode::CertifiedFixture => "certified-fixture",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitGroup {
    pub torsion_order: u32,
    pub torsion_generator: FieldElement,
    pub fundamental_units: Vec<FieldElement>,
    pub regulator: RatInterval,
    pub mode: UnitMode,
    /// Primes p for which p-saturation was certified (fixture mode).
    pub saturated_primes: Vec<u64>,
}

impl UnitGroup {
    pub fn rank(&self) -> usize {
        self.fundamental_units.len()
    }

    /// Torsion generator followed by the fundamental units.
    pub fn generators(&self) -> Vec<FieldElement> {
        std::iter::once(self.torsion_generator.clone()).chain(self.fundamental_units.iter().cloned()).collect()
    }
}

/// A claimed unit system for one field, as read from a fixture file.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitFixture {
    pub poly: QPoly,
    pub units: Vec<QPoly>,
    pub regulator: BigRational,
}

/// Parses the unit fixture grammar: `field`, `unit`*, `regulator`, `end`.
pub fn parse_unit_fixtures(text: &str) -> Result<Vec<UnitFixture>> {
    let mut out = Vec::new();
    let mut cur: Option<(QPoly, Vec<QPoly>, Option<BigRational>)> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| Error::Parse(format!("unit fixture line {}: {m}", lineno + 1));
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match key {
            "field" => {
                if cur.is_some() {
                    return Err(err("`field` before `end`"));
                }
                cur = Some((QPoly::parse(rest)?, Vec::new(), None));
            }
            "unit" => cur.as_mut().ok_or_else(|| err("`unit` outside a record"))?.1.push(QPoly::parse(rest)?),
            "regulator" => {
                let r = parse_decimal(rest.trim()).ok_or_else(|| err("bad regulator"))?;
                cur.as_mut().ok_or_else(|| err("`regulator` outside a record"))?.2 = Some(r);
            }
            "end" => {
                let (poly, units, reg) = cur.take().ok_or_else(|| err("`end` without `field`"))?;
                let regulator = reg.ok_or_else(|| err("record lacks a regulator"))?;
                out.push(UnitFixture { poly, units, regulator });
            }
            _ => return Err(err("unknown keyword")),
        }
    }
    if cur.is_some() {
        return Err(Error::Parse("unit fixture ends inside a record".into()));
    }
    Ok(out)
}

/// Exact rational value of a plain decimal string.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{ip}{fp}").parse().ok()?;
    let v = BigRational::new(digits, BigInt::from(10u32).pow(fp.len() as u32));
    Some(if neg { -v } else { v })
}

/// The fixture record describing this field (up to isomorphism), with its
/// units transported into the field's own coordinates.
pub fn fixture_units_for(k: &NumberField, fixtures: &[UnitFixture]) -> Result<Option<(Vec<FieldElement>, BigRational)>> {
    for fx in fixtures {
        if fx.poly.deg() != k.degree() {
            continue;
        }
        let image = if fx.poly == *k.poly() {
            Some(k.theta())
        } else {
            let d = fx.poly.discriminant();
            // the field discriminant divides the polynomial discriminant up to squares
            if (d.numer() % k.disc()).is_zero() {
                k.roots_of(&fx.poly, 1 << 20)?.into_iter().next()
            } else {
                None
            }
        };
        if let Some(r) = image {
            let units = fx.units.iter().map(|u| k.eval_poly_at(u, &r)).collect();
            return Ok(Some((units, fx.regulator.clone())));
        }
    }
    Ok(None)
}

/// Roots of unity: elements of T2 = n (every nonzero integer has T2 ≥ n,
/// with equality only at roots of unity).
pub fn torsion(k: &NumberField) -> Result<(u32, FieldElement)> {
    let n = k.degree();
    let cands = short_elements(k, &k.unit_ideal(), n as f64, 10_000)?;
    let mut best = (2u32, k.from_int(-1));
    for c in cands {
        for z in [c.clone(), k.neg(&c)] {
            if let Some(w) = root_of_unity_order(k, &z) {
                if w > best.0 {
                    best = (w, z);
                }
            }
        }
    }
    Ok(best)
}

fn root_of_unity_order(k: &NumberField, z: &FieldElement) -> Option<u32> {
    let one = k.one();
    let mut x = z.clone();
    for w in 1..=64u32 {
        if x == one {
            return Some(w);
        }
        x = k.mul(&x, z);
    }
    None
}

/// Certified log|σ_j(u)| for every place j.
fn log_embeddings(k: &NumberField, u: &FieldElement) -> Result<Vec<RatInterval>> {
    let (r1, r2) = k.signature();
    (0..r1 + r2)
        .map(|j| {
            let a = k.embed(u, j).abs();
            if !a.is_positive() {
                return Err(Error::Precision("embedding of a unit not separated from zero".into()));
            }
            Ok(a.ln(LOG_BITS))
        })
        .collect()
}

/// |det| of the regulator matrix (weights 2 at complex places, last place dropped).
pub fn regulator(k: &NumberField, units: &[FieldElement]) -> Result<RatInterval> {
    let (r1, _) = k.signature();
    let r = units.len();
    if r == 0 {
        return Ok(RatInterval::from_int(1));
    }
    let mut m: Vec<Vec<RatInterval>> = Vec::with_capacity(r);
    for u in units {
        let logs = log_embeddings(k, u)?;
        m.push((0..r).map(|j| if j < r1 { logs[j].clone() } else { logs[j].scale(&rat(2)) }).collect());
    }
    Ok(interval_det(&m).abs())
}

fn interval_det(m: &[Vec<RatInterval>]) -> RatInterval {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = RatInterval::from_int(0);
    permute(&mut perm, 0, m, &mut acc);
    acc
}

fn permute(perm: &mut Vec<usize>, i: usize, m: &[Vec<RatInterval>], acc: &mut RatInterval) {
    let n = perm.len();
    if i == n {
        let mut term = RatInterval::from_int(1);
        for (r, &c) in perm.iter().enumerate() {
            term = term.mul(&m[r][c]);
        }
        let inversions = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
        *acc = if inversions % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        *acc = acc.round_out(LOG_BITS);
        return;
    }
    for j in i..n {
        perm.swap(i, j);
        permute(perm, i + 1, m, acc);
        perm.swap(i, j);
    }
}

/// Unit group of K: computed for quadratic fields (and whenever the rank is
/// zero); otherwise verified from a claimed fundamental system.
pub fn unit_group(k: &NumberField, fixture: Option<&[FieldElement]>, claimed_regulator: Option<&BigRational>) -> Result<UnitGroup> {
    let (r1, r2) = k.signature();
    let rank = r1 + r2 - 1;
    let (w, zeta) = torsion(k)?;
    if rank == 0 {
        return Ok(UnitGroup {
            torsion_order: w,
            torsion_generator: zeta,
            fundamental_units: vec![],
            regulator: RatInterval::from_int(1),
            mode: UnitMode::Computed,
            saturated_primes: vec![],
        });
    }
    if fixture.is_none() && k.degree() == 2 {
        let eps = fundamental_unit_quadratic(k)?;
        let reg = regulator(k, std::slice::from_ref(&eps))?;
        return Ok(UnitGroup {
            torsion_order: w,
            torsion_generator: zeta,
            fundamental_units: vec![eps],
            regulator: reg,
            mode: UnitMode::Computed,
            saturated_primes: vec![],
        });
    }
    let units = fixture.ok_or_else(|| {
        Error::Precondition(format!("unit rank {rank} at degree {} needs a unit fixture", k.degree()))
    })?;
    if units.len() != rank {
        return Err(Error::FixtureRejected(format!("expected {rank} units, fixture lists {}", units.len())));
    }
    for (i, u) in units.iter().enumerate() {
        if !k.is_unit(u) {
            return Err(Error::FixtureRejected(format!("unit {i} is not a unit (norm {})", k.norm(u))));
        }
    }
    let reg = regulator(k, units)?;
    if !reg.is_positive() {
        return Err(Error::FixtureRejected("units are not independent (regulator interval meets 0)".into()));
    }
    if let Some(c) = claimed_regulator {
        let tol = reg.hi.clone() * BigRational::new(BigInt::one(), BigInt::from(1_000_000));
        if (c - reg.mid()).abs() > tol + reg.width() {
            return Err(Error::FixtureRejected(format!("claimed regulator {c} outside computed {reg}")));
        }
    }
    // [E : <units>] ≤ Reg/0.2, so saturation at every prime up to that bound proves index 1.
    let bound = (&reg.hi * BigRational::new(BigInt::from(REGULATOR_LOWER_BOUND.1), BigInt::from(REGULATOR_LOWER_BOUND.0)))
        .floor()
        .to_integer();
    let bound: u64 = bound.try_into().map_err(|_| Error::FixtureRejected("index bound too large".into()))?;
    let mut saturated = Vec::new();
    for p in primes_up_to(bound) {
        check_saturation(k, units, w, &zeta, p)?;
        saturated.push(p);
    }
    Ok(UnitGroup {
        torsion_order: w,
        torsion_generator: zeta,
        fundamental_units: units.to_vec(),
        regulator: reg,
        mode: UnitMode::CertifiedFixture,
        saturated_primes: saturated,
    })
}

/// Certifies that no product of the given units (and torsion when p | w)
/// outside the p-th powers of that group is a p-th power in K, using p-th
/// power residue characters at degree-one primes q ≡ 1 mod p.
pub fn check_saturation(k: &NumberField, units: &[FieldElement], w: u32, zeta: &FieldElement, p: u64) -> Result<()> {
    let mut gens: Vec<&FieldElement> = units.iter().collect();
    if w as u64 % p == 0 {
        gens.push(zeta);
    }
    let d = gens.len();
    if d == 0 {
        return Ok(());
    }
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut q = p + 1;
    while q <= SATURATION_PRIME_LIMIT {
        if is_prime_u64(q) {
            let e = (q - 1) / p;
            // a generator of μ_p in F_q and its discrete-log table
            let mut zeta_p = 1;
            for z in 2..q {
                zeta_p = powmod(z, e, q);
                if zeta_p != 1 {
                    break;
                }
            }
            let mut logs = std::collections::HashMap::new();
            let mut acc = 1u64;
            for i in 0..p {
                logs.insert(acc, i);
                acc = acc * zeta_p % q;
            }
            for t in k.degree_one_roots(q) {
                let row: Option<Vec<u64>> = gens
                    .iter()
                    .map(|u| k.reduce_at(u, q, t).and_then(|v| logs.get(&powmod(v, e, q)).copied()))
                    .collect();
                if let Some(row) = row {
                    rows.push(row);
                    if fp_rank(&rows, p) == d {
                        return Ok(());
                    }
                }
            }
        }
        q += p;
    }
    Err(Error::Inconclusive(format!("could not certify {p}-saturation of the unit fixture")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::parse_field;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("10.25"), Some(BigRational::new(BigInt::from(41), BigInt::from(4))));
        assert_eq!(parse_decimal("-3"), Some(rat(-3)));
        assert_eq!(parse_decimal("1.2.3"), None);
    }

    #[test]
    fn torsion_orders() {
        assert_eq!(torsion(&parse_field("x^2+1").unwrap()).unwrap().0, 4);
        assert_eq!(torsion(&parse_field("x^2+x+1").unwrap()).unwrap().0, 6);
        assert_eq!(torsion(&parse_field("x^2-13").unwrap()).unwrap().0, 2);
        assert_eq!(torsion(&parse_field("x^4+1").unwrap()).unwrap().0, 8);
    }

    #[test]
    fn quadratic_units_computed() {
        let k = parse_field("x^2-13").unwrap();
        let u = unit_group(&k, None, None).unwrap();
        assert_eq!(u.mode, UnitMode::Computed);
        assert_eq!(u.rank(), 1);
        // log((3+√13)/2) ≈ 1.19476
        assert!(u.regulator.lo > BigRational::new(BigInt::from(1194), BigInt::from(1000)));
        assert!(u.regulator.hi < BigRational::new(BigInt::from(1195), BigInt::from(1000)));
    }

    #[test]
    fn dependent_fixture_is_rejected() {
        let k = parse_field("x^4-3x^2-1").unwrap();
        let t = k.theta();
        let t2 = k.mul(&t, &t);
        assert!(matches!(unit_group(&k, Some(&[t.clone(), t2]), None), Err(Error::FixtureRejected(_))));
        assert!(matches!(unit_group(&k, Some(&[t]), None), Err(Error::FixtureRejected(_))));
    }

    #[test]
    fn saturation_detects_squares() {
        let k = parse_field("x^2-13").unwrap();
        let u = unit_group(&k, None, None).unwrap();
        let eps = &u.fundamental_units[0];
        assert!(check_saturation(&k, std::slice::from_ref(eps), 2, &u.torsion_generator, 2).is_ok());
        assert!(check_saturation(&k, std::slice::from_ref(eps), 2, &u.torsion_generator, 3).is_ok());
        let sq = k.mul(eps, eps);
        assert!(check_saturation(&k, &[sq], 2, &u.torsion_generator, 2).is_err());
    }

    #[test]
    fn fixture_grammar() {
        let text = "# c\nfield x^2 - 2\nunit x + 1\nregulator 0.8813735870\nend\n";
        let fx = parse_unit_fixtures(text).unwrap();
        assert_eq!(fx.len(), 1);
        assert_eq!(fx[0].units[0], QPoly::from_ints(&[1, 1]));
        assert!(parse_unit_fixtures("unit x\n").is_err());
        assert!(parse_unit_fixtures("field x^2-2\nunit x+1\n").is_err());
    }
}
