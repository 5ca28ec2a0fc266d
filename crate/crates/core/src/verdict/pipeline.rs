//! The three-step procedure end to end: field → bounds → torsion field →
//! simples → Ext¹ table → conditions → theorem engine or fallback.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::{decide, Certificate, CategoryDescriptor, RayData, Step};
use crate::bounds::{fontaine_bound, FontaineBound, OdlyzkoTable};
use crate::classfield::classgroup::primes_of_norm_up_to;
use crate::classfield::{ray_class_group, s_unit_square_classes, ClassGroup, Modulus, UnitFixture, UnitGroup, UnitMode};
use crate::error::{Error, Result};
use crate::exactalg::intfactor::is_prime_u64;
use crate::exactalg::RatInterval;
use crate::filtration::{fixture_field, ExtEntry, ExtTable, ExtValue, LabelClass, Provenance, SimpleLabel};
use crate::numfield::compositum::isomorphic;
use crate::numfield::{parse_field, NumberField, PrimeIdeal};
use crate::schemes::groups::FiniteGroup;
use crate::schemes::modules::simple_modules;
use crate::schemes::simple::{etale_label, multiplicative_label, oort_tate_simples, SimpleScheme};
use crate::schemes::torsion::{arithmetic_of, cap_modulus, certify_torsion_field, torsion_field_lower, TorsionFieldCertificate, TorsionStatus};

/// Hypothesis id standing in for a certified torsion field: every simple
/// object has order ℓ.
pub const SIMPLES_ORDER_ELL: &str = "simples-order-ell";

/// Largest norm searched for a prime with generating Frobenius.
const INERT_PRIME_NORM_LIMIT: u64 = 2000;

#[derive(Clone, Debug)]
pub struct PipelineInput {
    pub field_poly: String,
    pub ell: u64,
    /// Primes of S: `p` for every prime above p, `p.i` for the i-th.
    pub s: Vec<String>,
    pub odlyzko: OdlyzkoTable,
    pub unit_fixtures: Vec<UnitFixture>,
    pub ext_fixtures: Vec<String>,
    pub modulus_cap: u32,
    pub wide_places: bool,
    pub seed: u64,
    pub search_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

impl StageError {
    /// Malformed input rather than an undecided computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.error,
            Error::InvalidInput(_) | Error::Parse(_) | Error::Reducible(_) | Error::DegreeTooLarge(_) | Error::FixtureRejected(_)
        )
    }
}

fn at(stage: &'static str) -> impl Fn(Error) -> StageError {
    move |error| StageError { stage, error }
}

pub struct Context {
    pub k: NumberField,
    pub s_primes: Vec<PrimeIdeal>,
    pub s_labels: Vec<String>,
    pub units: UnitGroup,
    pub cl: ClassGroup,
}

fn parse_s(k: &NumberField, ell: u64, specs: &[String]) -> Result<(Vec<PrimeIdeal>, Vec<String>)> {
    let mut primes = Vec::new();
    let mut labels = Vec::new();
    for spec in specs {
        let (p, idx) = match spec.split_once('.') {
            Some((p, i)) => (p, Some(i.parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad prime spec {spec}")))?)),
            None => (spec.as_str(), None),
        };
        let p: u64 = p.parse().map_err(|_| Error::InvalidInput(format!("bad prime spec {spec}")))?;
        if !is_prime_u64(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if p == ell {
            return Err(Error::InvalidInput(format!("ℓ = {ell} must be coprime to the primes of S")));
        }
        let above = k.factor_prime(p)?;
        let chosen: Vec<usize> = match idx {
            Some(i) if i >= 1 && i <= above.len() => vec![i - 1],
            Some(_) => return Err(Error::InvalidInput(format!("{spec}: {p} has {} primes above it", above.len()))),
            None => (0..above.len()).collect(),
        };
        for i in chosen {
            if primes.iter().any(|q: &PrimeIdeal| q.ideal == above[i].ideal) {
                continue;
            }
            labels.push(if above.len() == 1 { p.to_string() } else { format!("{p}.{}", i + 1) });
            primes.push(above[i].clone());
        }
    }
    Ok((primes, labels))
}

pub fn setup(input: &PipelineInput) -> std::result::Result<Context, StageError> {
    let e = at("field");
    if !is_prime_u64(input.ell) {
        return Err(e(Error::InvalidInput(format!("ℓ = {} is not prime", input.ell))));
    }
    let k = parse_field(&input.field_poly).map_err(&e)?;
    let (s_primes, s_labels) = parse_s(&k, input.ell, &input.s).map_err(&e)?;
    let (units, cl) = arithmetic_of(&k, &input.unit_fixtures, input.search_cap).map_err(&e)?;
    Ok(Context { k, s_primes, s_labels, units, cl })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsArtifact {
    pub field: String,
    pub ell: u64,
    pub root_discriminant: RatInterval,
    pub fontaine_bound: RatInterval,
    pub degree_cap: u32,
    /// Odlyzko lower bound at degree cap + 1, exceeding the Fontaine bound.
    pub odlyzko_next: String,
}

pub fn stage_bounds(ctx: &Context, input: &PipelineInput) -> std::result::Result<(BoundsArtifact, FontaineBound), StageError> {
    let e = at("bounds");
    let fb = fontaine_bound(&ctx.k, input.ell).map_err(&e)?;
    let cap = input.odlyzko.max_degree(&fb.value).map_err(&e)?;
    let art = BoundsArtifact {
        field: ctx.k.poly().to_string(),
        ell: input.ell,
        root_discriminant: fb.root_discriminant.clone(),
        fontaine_bound: fb.value.clone(),
        degree_cap: cap,
        odlyzko_next: input.odlyzko.lower_bound(cap + 1).to_string(),
    };
    Ok((art, fb))
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionArtifact {
    pub lower_field: String,
    pub lower_degree: usize,
    pub index_over_base: usize,
    pub kummer_generators: Vec<String>,
    pub status: TorsionStatus,
    pub reason: Option<String>,
    pub certificate: Option<TorsionFieldCertificate>,
}

pub fn stage_torsion(ctx: &Context, input: &PipelineInput, fb: &FontaineBound) -> std::result::Result<TorsionArtifact, StageError> {
    let e = at("torsion-field");
    let k = &ctx.k;
    let lower_only = |field: String, degree: usize, index: usize, gens: Vec<String>, reason: String| TorsionArtifact {
        lower_field: field,
        lower_degree: degree,
        index_over_base: index,
        kummer_generators: gens,
        status: TorsionStatus::LowerOnly,
        reason: Some(reason),
        certificate: None,
    };
    if input.ell != 2 {
        return Ok(lower_only(
            k.poly().to_string(),
            k.degree(),
            1,
            vec![],
            format!("torsion-field layers are only built for ℓ = 2, not {}", input.ell),
        ));
    }
    let classes = s_unit_square_classes(k, &ctx.s_primes, &ctx.units, &ctx.cl, input.search_cap).map_err(&e)?;
    let lower = torsion_field_lower(k, input.ell, &classes).map_err(&e)?;
    let gens: Vec<String> = lower.kummer_generators.iter().map(|g| g.to_string()).collect();
    if !ctx.s_primes.is_empty() {
        return Ok(lower_only(
            lower.field.poly().to_string(),
            lower.field.degree(),
            lower.index_over_base(),
            gens,
            "the root-discriminant bound applies only for S empty".into(),
        ));
    }
    let cap = cap_modulus(&lower.field, input.ell, input.modulus_cap, input.wide_places).map_err(&e)?;
    let cert =
        certify_torsion_field(&lower, input.ell, fb, &input.odlyzko, &cap, &input.unit_fixtures, input.search_cap).map_err(&e)?;
    Ok(TorsionArtifact {
        lower_field: lower.field.poly().to_string(),
        lower_degree: lower.field.degree(),
        index_over_base: lower.index_over_base(),
        kummer_generators: gens,
        status: cert.status,
        reason: cert.reason.clone(),
        certificate: Some(cert),
    })
}

pub fn stage_simples(ctx: &Context, input: &PipelineInput) -> std::result::Result<Vec<SimpleScheme>, StageError> {
    oort_tate_simples(&ctx.k, &ctx.s_primes, input.ell, &ctx.cl, &ctx.units, input.search_cap).map_err(at("simples"))
}

fn label_of(s: &SimpleScheme) -> SimpleLabel {
    let class = if s.kind.is_etale() {
        LabelClass::Etale
    } else if s.kind.is_multiplicative() {
        LabelClass::Multiplicative
    } else {
        LabelClass::Other
    };
    SimpleLabel::new(&s.label, class, &s.dual_label)
}

/// The fixture table for K (matched up to isomorphism), completed with
/// Ext¹(Z/ℓZ, μ_ℓ) from the Kummer count when the class number is odd.
pub fn stage_ext_table(ctx: &Context, input: &PipelineInput, simples: &[SimpleScheme]) -> std::result::Result<ExtTable, StageError> {
    let e = at("ext-table");
    let labels: Vec<SimpleLabel> = simples.iter().map(label_of).collect();
    let mut table = None;
    for text in &input.ext_fixtures {
        let Some(poly) = fixture_field(text) else { continue };
        let f = parse_field(poly).map_err(&e)?;
        if isomorphic(&ctx.k, &f).map_err(&e)? {
            table = Some(ExtTable::parse_fixture(text, labels.clone()).map_err(&e)?);
            break;
        }
    }
    let mut table = match table {
        Some(t) => t,
        None => ExtTable::new(labels).map_err(&e)?,
    };
    let (et, mu) = (etale_label(input.ell), multiplicative_label(input.ell));
    let odd_h = (ctx.cl.order() % BigInt::from(2)) != BigInt::zero();
    if input.ell == 2 && odd_h && table.simple(&et).is_some() && table.simple(&mu).is_some() {
        let classes = s_unit_square_classes(&ctx.k, &ctx.s_primes, &ctx.units, &ctx.cl, input.search_cap).map_err(&e)?;
        let dim = classes.len().trailing_zeros();
        let value = if dim == 0 { ExtValue::Zero } else { ExtValue::Positive(dim) };
        match table.value(&et, &mu) {
            ExtValue::Unknown => {}
            v if v == value => {}
            v => {
                return Err(e(Error::FixtureRejected(format!(
                    "Ext¹({et}, {mu}) is {v} in the fixture but the Kummer count gives {value}"
                ))))
            }
        }
        let method = format!("Kummer: O_S*/(O_S*)² has order 2^{dim} and the class number is odd");
        table.set(&et, &mu, ExtEntry::new(value, Provenance::Computed, &method)).map_err(&e)?;
    }
    Ok(table)
}

fn element_order(x: &[BigInt], invariants: &[u64]) -> u64 {
    x.iter().zip(invariants).fold(1u64, |acc, (xi, &d)| {
        let r = (xi % BigInt::from(d) + BigInt::from(d)) % BigInt::from(d);
        let o = d / num_integer::gcd(d, r.to_u64().expect("reduced"));
        num_integer::lcm(acc, o)
    })
}

/// Ray class data over F = K for the modulus (primes of S)·(real places).
fn ray_data(ctx: &Context, input: &PipelineInput) -> Result<RayData> {
    let k = &ctx.k;
    let places: Vec<usize> = (0..k.signature().0).collect();
    let m = Modulus::new(k, ctx.s_primes.iter().map(|p| (p.clone(), 1)).collect(), places.clone())?;
    let g = ray_class_group(k, &m, &ctx.units, &ctx.cl, input.search_cap)?;
    let invariants: Vec<u64> = g
        .invariants
        .iter()
        .map(|d| d.to_u64().ok_or_else(|| Error::Inconclusive(format!("ray class invariant {d} too large"))))
        .collect::<Result<_>>()?;
    let order: u64 = invariants.iter().product();
    let mut inert = None;
    for q in primes_of_norm_up_to(k, INERT_PRIME_NORM_LIMIT)? {
        if q.p == input.ell || ctx.s_primes.iter().any(|s| s.ideal == q.ideal) {
            continue;
        }
        let x = g.dlog_ideal(k, &q.ideal)?;
        if element_order(&x, &invariants) == order {
            inert = Some(format!("the prime of norm {} above {}", q.norm(), q.p));
            break;
        }
    }
    let mut parts: Vec<String> = ctx.s_labels.iter().map(|l| format!("P_{l}")).collect();
    parts.extend(places.iter().map(|i| format!("∞{}", i + 1)));
    let modulus = if parts.is_empty() { "(1)".to_string() } else { parts.join("·") };
    Ok(RayData { modulus, invariants, exactness_verified: g.exactness_verified, inert_prime: inert })
}

fn torsion_step(t: &TorsionArtifact, base_degree: usize) -> Step {
    match &t.certificate {
        Some(c) if c.is_certified() => {
            let prov = if c.unit_mode == Some(UnitMode::CertifiedFixture) { Provenance::Fixture } else { Provenance::Computed };
            Step::new(
                "torsion-field",
                format!(
                    "T = {} of degree {}, [T:K] = {} with K of degree {base_degree}; no abelian layer over it satisfies the bound",
                    c.field, c.degree, c.index_over_base
                ),
                serde_json::to_value(c).expect("certificate"),
                prov,
            )
        }
        _ => Step::new(
            "torsion-field",
            format!(
                "T contains {} of degree {}, [.:K] = {}; equality not certified: {}",
                t.lower_field,
                t.lower_degree,
                t.index_over_base,
                t.reason.as_deref().unwrap_or("")
            ),
            serde_json::to_value(t).expect("artifact"),
            Provenance::Computed,
        ),
    }
}

/// Every simple object has order ℓ: Gal(T/K) is an ℓ-group, so its only
/// simple F_ℓ-module is the trivial one.
fn order_ell_step(t: &TorsionArtifact, table: &ExtTable, ell: u64, seed: u64) -> std::result::Result<Step, StageError> {
    let e = at("simples");
    if t.status == TorsionStatus::Certified {
        let r = t.kummer_generators.len() as u32;
        let g = if r == 0 { FiniteGroup::trivial() } else { FiniteGroup::elementary_abelian(ell as usize, r) };
        let ms = simple_modules(&g, ell, seed).map_err(&e)?;
        let trivial = ms.len() == 1 && ms[0].dimension == 1;
        let dims: Vec<usize> = ms.iter().map(|m| m.dimension).collect();
        if !trivial {
            return Err(e(Error::Inconclusive(format!("Gal(T/K) has simple modules of dimensions {dims:?}"))));
        }
        return Ok(Step::new(
            SIMPLES_ORDER_ELL,
            format!("Gal(T/K) ≅ (Z/{ell})^{r} has only the trivial simple F_{ell}-module, so every simple object has order {ell}"),
            json!({"galois_group_order": g.order(), "simple_module_dimensions": dims}),
            Provenance::Computed,
        ));
    }
    Ok(match table.hypothesis(SIMPLES_ORDER_ELL) {
        Some(h) => Step::new(SIMPLES_ORDER_ELL, h.statement.clone(), json!({"hypothesis": SIMPLES_ORDER_ELL}), h.provenance),
        None => Step::new(
            SIMPLES_ORDER_ELL,
            "not established: the torsion field is only bounded below",
            json!({"blocking": format!("simple objects of order {ell} not established (torsion field lower bound only)")}),
            Provenance::Computed,
        ),
    })
}

pub struct Run {
    pub bounds: BoundsArtifact,
    pub torsion: TorsionArtifact,
    pub simples: Vec<SimpleScheme>,
    pub descriptor: CategoryDescriptor,
    pub certificate: Certificate,
}

pub fn verify(input: &PipelineInput, allow_fallback: bool) -> std::result::Result<Run, StageError> {
    let ctx = setup(input)?;
    let (bounds, fb) = stage_bounds(&ctx, input)?;
    let torsion = stage_torsion(&ctx, input, &fb)?;
    let simples = stage_simples(&ctx, input)?;
    let table = stage_ext_table(&ctx, input, &simples)?;

    let mut steps = vec![Step::new(
        "bounds",
        format!(
            "root discriminants of torsion fields are below {}; the Odlyzko bounds cap their degree at {}",
            bounds.fontaine_bound, bounds.degree_cap
        ),
        serde_json::to_value(&bounds).expect("bounds"),
        Provenance::Fixture,
    )];
    steps.push(torsion_step(&torsion, ctx.k.degree()));
    let labels: Vec<&str> = simples.iter().map(|s| s.label.as_str()).collect();
    steps.push(Step::new(
        "simples",
        format!("the simple order-{} schemes are {}", input.ell, labels.join(", ")),
        serde_json::to_value(&simples).expect("simples"),
        Provenance::Computed,
    ));
    steps.push(order_ell_step(&torsion, &table, input.ell, input.seed)?);
    let table_prov = table
        .entries()
        .map(|(_, e)| e.provenance)
        .chain(table.hypotheses.iter().map(|h| h.provenance))
        .max()
        .unwrap_or(Provenance::Computed);
    steps.push(Step::new(
        "ext-table",
        format!("Ext¹ table with {} recorded entries and {} hypotheses", table.entries().count(), table.hypotheses.len()),
        serde_json::to_value(&table).expect("table"),
        table_prov,
    ));

    let etale_field_is_base = simples.iter().filter(|s| s.kind.is_etale()).all(|s| s.points_degree == ctx.k.degree());
    let ray = if etale_field_is_base {
        ray_data(&ctx, input).map_err(|e| e.to_string())
    } else {
        Err("F ≠ K: ray class data over F and an inert-prime witness must be supplied".to_string())
    };
    let descriptor = CategoryDescriptor {
        field: ctx.k.poly().to_string(),
        s: ctx.s_labels.clone(),
        ell: input.ell,
        ext_table: table,
        etale_field: if etale_field_is_base { ctx.k.poly().to_string() } else { "compositum of étale points fields".into() },
        etale_field_is_base,
        ray,
        preliminary: steps,
    };
    let certificate = decide(&descriptor, allow_fallback);
    Ok(Run { bounds, torsion, simples, descriptor, certificate })
}

pub const STAGES: [&str; 4] = ["bounds", "torsion-field", "simples", "conditions"];

/// One stage's artifact, running only what it depends on.
pub fn inspect(input: &PipelineInput, stage: &str) -> std::result::Result<Value, StageError> {
    if !STAGES.contains(&stage) {
        return Err(StageError { stage: "inspect", error: Error::InvalidInput(format!("unknown stage {stage}; expected one of {STAGES:?}")) });
    }
    let ctx = setup(input)?;
    match stage {
        "bounds" => Ok(serde_json::to_value(stage_bounds(&ctx, input)?.0).expect("bounds")),
        "torsion-field" => {
            let (_, fb) = stage_bounds(&ctx, input)?;
            Ok(serde_json::to_value(stage_torsion(&ctx, input, &fb)?).expect("torsion"))
        }
        "simples" => Ok(serde_json::to_value(stage_simples(&ctx, input)?).expect("simples")),
        _ => {
            let run = verify(input, false)?;
            let steps: Vec<&Step> = run.certificate.steps.iter().filter(|s| s.id.starts_with("condition-")).collect();
            Ok(serde_json::to_value(steps).expect("steps"))
        }
    }
}
