//! Condition (1)/(2) checks, the growth argument excluding abelian
//! varieties, the rank-stability fallback, and certificates carrying the
//! provenance of every step.

pub mod pipeline;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::filtration::{condition_one_gaps, ExtEntry, ExtTable, ExtValue, LabelClass, Provenance, Witness};

/// Hypothesis id consumed by the rank-stability fallback.
pub const ANNIHILATION: &str = "annihilation";

/// Class-field data for Condition (2): the ray class group of F for the
/// modulus (primes of S)·(real places), and a prime whose Frobenius
/// generates it (inert in R/K).
#[derive(Clone, Debug, Serialize)]
pub struct RayData {
    pub modulus: String,
    pub invariants: Vec<u64>,
    pub exactness_verified: bool,
    pub inert_prime: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CategoryDescriptor {
    pub field: String,
    pub s: Vec<String>,
    pub ell: u64,
    pub ext_table: ExtTable,
    /// Defining polynomial and degree of F, the compositum of K(E) over étale E.
    pub etale_field: String,
    pub etale_field_is_base: bool,
    /// Ray class data over F, or why it is unavailable.
    pub ray: std::result::Result<RayData, String>,
    /// Steps established before the conditions (bounds, torsion field, simples, table).
    pub preliminary: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub id: String,
    pub claim: String,
    pub evidence: Value,
    pub provenance: Provenance,
}

impl Step {
    pub fn new(id: &str, claim: impl Into<String>, evidence: Value, provenance: Provenance) -> Self {
        Step { id: id.into(), claim: claim.into(), evidence, provenance }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NoNonzeroAbelianVariety,
    ConditionsFail(String),
    Inconclusive(String),
    /// Only abelian varieties with étale or multiplicative subquotients are excluded.
    Qualified(String),
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::NoNonzeroAbelianVariety => 0,
            Verdict::ConditionsFail(_) => 2,
            Verdict::Inconclusive(_) => 3,
            Verdict::Qualified(_) => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub field: String,
    #[serde(rename = "S")]
    pub s: Vec<String>,
    pub ell: u64,
    pub steps: Vec<Step>,
    pub verdict: Verdict,
    pub flags: Vec<String>,
}

impl Certificate {
    pub fn step(&self, id: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {e}")))
    }
}

/// Top-level flags: which provenances occur, and the route taken.
pub fn provenance_flags(steps: &[Step]) -> Vec<String> {
    let has = |p: Provenance| steps.iter().any(|s| s.provenance == p);
    let mut flags = Vec::new();
    if has(Provenance::Fixture) {
        flags.push("uses-fixtures".to_string());
    }
    if has(Provenance::PaperAssumed) {
        flags.push("uses-assumptions".to_string());
    }
    if flags.is_empty() {
        flags.push("fully-computed".to_string());
    }
    flags
}

fn certificate(d: &CategoryDescriptor, steps: Vec<Step>, verdict: Verdict, route: &str) -> Certificate {
    let mut flags = provenance_flags(&steps);
    flags.push(format!("route:{route}"));
    Certificate { field: d.field.clone(), s: d.s.clone(), ell: d.ell, steps, verdict, flags }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ConditionOne {
    Pass,
    Fail { nonetale: String, etale: String, value: String, witness: Option<Witness> },
    Inconclusive { unknown: Vec<(String, String)> },
}

/// The entry deciding Ext¹(A, B), directly or through its Cartier dual.
fn deciding_entry<'a>(t: &'a ExtTable, a: &str, b: &str) -> Option<&'a ExtEntry> {
    match t.entry(a, b) {
        Some(e) if e.value != ExtValue::Unknown => Some(e),
        _ => t.entry(t.dual_of(b)?, t.dual_of(a)?).filter(|e| e.value != ExtValue::Unknown),
    }
}

fn mixed_pairs(t: &ExtTable) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for a in t.simples.iter().filter(|s| s.class != LabelClass::Etale) {
        for e in t.simples.iter().filter(|s| s.class == LabelClass::Etale) {
            out.push((a.label.clone(), e.label.clone()));
        }
    }
    out
}

/// Condition (1): Ext¹(T, E) = 0 for every non-étale simple T and étale simple E.
/// A known nonzero entry fails the condition even when others are unknown.
pub fn check_condition_1(d: &CategoryDescriptor) -> (ConditionOne, Provenance) {
    let t = &d.ext_table;
    let mut unknown = Vec::new();
    let mut prov = Provenance::Computed;
    for (a, e) in mixed_pairs(t) {
        match deciding_entry(t, &a, &e) {
            Some(entry) if matches!(entry.value, ExtValue::Positive(_)) => {
                return (
                    ConditionOne::Fail { nonetale: a, etale: e, value: entry.value.to_string(), witness: entry.witness.clone() },
                    entry.provenance,
                );
            }
            Some(entry) => prov = prov.max(entry.provenance),
            None => unknown.push((a, e)),
        }
    }
    if unknown.is_empty() {
        (ConditionOne::Pass, prov)
    } else {
        (ConditionOne::Inconclusive { unknown }, prov)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ConditionTwo {
    Pass,
    Fail { invariants: Vec<u64> },
    Inconclusive { reason: String },
}

/// Cyclic iff no prime divides two invariants.
pub fn is_cyclic(invariants: &[u64]) -> bool {
    let nontrivial: Vec<u64> = invariants.iter().copied().filter(|&x| x > 1).collect();
    nontrivial.iter().enumerate().all(|(i, &x)| nontrivial[i + 1..].iter().all(|&y| num_integer::gcd(x, y) == 1))
}

/// Condition (2): F/K is finite (finitely many simples) and the ray class
/// group of F for the tame modulus over S and the real places is cyclic.
pub fn check_condition_2(d: &CategoryDescriptor) -> ConditionTwo {
    match &d.ray {
        Err(reason) => ConditionTwo::Inconclusive { reason: reason.clone() },
        Ok(r) if !r.exactness_verified => ConditionTwo::Inconclusive { reason: "ray class group order not verified".into() },
        Ok(r) if is_cyclic(&r.invariants) => ConditionTwo::Pass,
        Ok(r) => ConditionTwo::Fail { invariants: r.invariants.clone() },
    }
}

fn condition_steps(d: &CategoryDescriptor) -> (Vec<Step>, ConditionOne, ConditionTwo) {
    let (c1, p1) = check_condition_1(d);
    let c1_claim = match &c1 {
        ConditionOne::Pass => "Condition (1) holds: Ext¹(T, E) = 0 for every non-étale T and étale E".to_string(),
        ConditionOne::Fail { nonetale, etale, value, witness } => format!(
            "Condition (1) fails: Ext¹({nonetale}, {etale}) is {value}{}",
            witness.as_ref().map(|w| format!(", witnessed by {}", w.name)).unwrap_or_default()
        ),
        ConditionOne::Inconclusive { unknown } => format!("Condition (1) undecided: {} entries unknown", unknown.len()),
    };
    let entries: Vec<Value> = mixed_pairs(&d.ext_table)
        .into_iter()
        .map(|(a, e)| {
            let entry = deciding_entry(&d.ext_table, &a, &e);
            json!({
                "pair": [a, e],
                "value": entry.map_or(Value::from("unknown"), |x| serde_json::to_value(x.value).expect("value")),
                "provenance": entry.map(|x| x.provenance),
            })
        })
        .collect();
    let s1 = Step::new("condition-1", c1_claim, json!({"check": c1, "entries": entries}), p1);

    let c2 = check_condition_2(d);
    let c2_claim = match (&c2, &d.ray) {
        (ConditionTwo::Pass, Ok(r)) => format!(
            "Condition (2) holds: F = {} and the ray class group for {} is {}",
            d.etale_field,
            r.modulus,
            if r.invariants.iter().all(|&x| x == 1) { "trivial".to_string() } else { format!("cyclic {:?}", r.invariants) }
        ),
        (ConditionTwo::Fail { invariants }, _) => format!("Condition (2) fails: ray class group {invariants:?} is not cyclic"),
        (ConditionTwo::Inconclusive { reason }, _) => format!("Condition (2) undecided: {reason}"),
        _ => unreachable!("pass implies ray data"),
    };
    let s2 = Step::new(
        "condition-2",
        c2_claim,
        json!({"check": c2, "etale_field": d.etale_field, "etale_field_is_base": d.etale_field_is_base, "ray": d.ray.as_ref().ok()}),
        Provenance::Computed,
    );
    (vec![s1, s2], c1, c2)
}

fn simple_classes(t: &ExtTable) -> (Vec<String>, Vec<String>, Vec<String>) {
    let pick = |c: LabelClass| t.simples.iter().filter(|s| s.class == c).map(|s| s.label.clone()).collect::<Vec<_>>();
    (pick(LabelClass::Etale), pick(LabelClass::Multiplicative), pick(LabelClass::Other))
}

/// Steps (i)–(iii) of the growth argument and the verdict, given both conditions.
pub fn theorem_engine(d: &CategoryDescriptor) -> Result<Certificate> {
    let (cond, c1, c2) = condition_steps(d);
    if c1 != ConditionOne::Pass || c2 != ConditionTwo::Pass {
        return Err(Error::Precondition(format!(
            "conditions not established (condition 1: {}, condition 2: {}); try the rank-stability fallback",
            cond[0].claim, cond[1].claim
        )));
    }
    let ray = d.ray.as_ref().expect("condition 2 passed");
    let inert = match (&ray.inert_prime, d.etale_field_is_base) {
        (Some(q), _) => q.clone(),
        (None, true) => return Err(Error::Precondition("no prime with generating Frobenius found".into())),
        (None, false) => return Err(Error::Precondition("F ≠ K: an inert-prime witness must be supplied".into())),
    };
    if !condition_one_gaps(&d.ext_table).is_empty() {
        return Err(Error::Precondition("étale decomposition unavailable".into()));
    }
    let ell = d.ell;
    let mut steps = d.preliminary.clone();
    steps.extend(cond);
    steps.push(Step::new(
        "constant-over-R",
        "every object of the category becomes constant over R, the ray class field of F for the Condition (2) modulus",
        json!({"R_over_F": ray.invariants, "cyclic": true}),
        Provenance::Computed,
    ));
    steps.push(Step::new(
        "inert-prime",
        format!("{inert} is inert in the cyclic extension R/K (its Frobenius generates the ray class group)"),
        json!({"prime": inert, "ray_invariants": ray.invariants}),
        Provenance::Computed,
    ));
    let (etale, mult, other) = simple_classes(&d.ext_table);
    steps.push(Step::new(
        "etale-growth",
        format!(
            "by the étale decomposition, an abelian variety whose {ell}-torsion admits k ≥ 1 étale simples has at least {ell}^(kn) points in the fiber at the inert prime for every n, contradicting finiteness"
        ),
        json!({"etale_simples": etale, "bound": format!("{ell}^(k·n)")}),
        Provenance::Computed,
    ));
    steps.push(Step::new(
        "multiplicative-growth",
        format!("a multiplicative simple in A[{ell}] is an étale simple in the dual abelian variety, excluded by the same count"),
        json!({"multiplicative_simples": mult, "duality": "Cartier"}),
        Provenance::Computed,
    ));
    let verdict = if other.is_empty() {
        steps.push(Step::new(
            "conclusion",
            format!("every simple object is étale or multiplicative, so A[{ell}] of a nonzero abelian variety must admit one: none exists"),
            json!({"simples": d.ext_table.simples.iter().map(|s| &s.label).collect::<Vec<_>>()}),
            Provenance::Computed,
        ));
        Verdict::NoNonzeroAbelianVariety
    } else {
        let detail = format!("abelian varieties with étale or multiplicative subquotients excluded; {} not covered", other.join(", "));
        steps.push(Step::new("conclusion", detail.clone(), json!({"not_covered": other}), Provenance::Computed));
        Verdict::Qualified(detail)
    };
    Ok(certificate(d, steps, verdict, "theorem"))
}

/// The annihilation hypothesis, recorded in the table or implied by it
/// (all mixed Ext¹ entries known zero).
fn annihilation(d: &CategoryDescriptor) -> Option<(String, Provenance)> {
    if let Some(h) = d.ext_table.hypothesis(ANNIHILATION) {
        return Some((h.statement.clone(), h.provenance));
    }
    let pairs = mixed_pairs(&d.ext_table);
    let mut prov = Provenance::Computed;
    for (a, e) in &pairs {
        match deciding_entry(&d.ext_table, a, e) {
            Some(x) if x.value == ExtValue::Zero => prov = prov.max(x.provenance),
            _ => return None,
        }
    }
    Some(("all extensions of a non-étale simple by an étale simple split, so they are killed by ℓ".into(), prov))
}

/// Under the annihilation hypothesis, the orders of the level-n torsion
/// objects cannot grow with n, which a nonzero abelian variety requires.
pub fn rank_stability_fallback(d: &CategoryDescriptor) -> Result<Certificate> {
    let (statement, prov) =
        annihilation(d).ok_or_else(|| Error::Precondition("the annihilation hypothesis is not recorded".into()))?;
    let (cond, _, _) = condition_steps(d);
    let ell = d.ell;
    let mut steps = d.preliminary.clone();
    steps.extend(cond);
    steps.push(Step::new(ANNIHILATION, statement, json!({"hypothesis": ANNIHILATION}), prov));
    steps.push(Step::new(
        "rank-stability",
        format!(
            "under the annihilation hypothesis the order of the level-n torsion objects is bounded independently of n, contradicting the growth {ell}^(2gn) of A[{ell}^n] for g ≥ 1: no nonzero abelian variety exists"
        ),
        json!({"growth": format!("{ell}^(2·g·n)"), "depends_on": [ANNIHILATION]}),
        prov,
    ));
    Ok(certificate(d, steps, Verdict::NoNonzeroAbelianVariety, "fallback"))
}

/// Runs the theorem engine, then the fallback when allowed, and turns
/// refusals into verdicts.
pub fn decide(d: &CategoryDescriptor, allow_fallback: bool) -> Certificate {
    if let Some(reason) = d.preliminary.iter().find_map(|s| s.evidence.get("blocking").and_then(Value::as_str)) {
        let (cond, _, _) = condition_steps(d);
        let mut steps = d.preliminary.clone();
        steps.extend(cond);
        return certificate(d, steps, Verdict::Inconclusive(reason.to_string()), "none");
    }
    match theorem_engine(d) {
        Ok(c) => c,
        Err(refusal) => {
            let (cond, c1, c2) = condition_steps(d);
            if allow_fallback {
                if let Ok(c) = rank_stability_fallback(d) {
                    return c;
                }
            }
            let failed = matches!(c1, ConditionOne::Fail { .. }) || matches!(c2, ConditionTwo::Fail { .. });
            let detail = if failed {
                let mut parts: Vec<&str> = cond.iter().filter(|s| s.claim.contains("fails")).map(|s| s.claim.as_str()).collect();
                if allow_fallback {
                    parts.push("the rank-stability fallback needs the annihilation hypothesis");
                }
                parts.join("; ")
            } else {
                refusal.to_string()
            };
            let mut steps = d.preliminary.clone();
            steps.extend(cond);
            let verdict = if failed { Verdict::ConditionsFail(detail) } else { Verdict::Inconclusive(detail) };
            certificate(d, steps, verdict, "none")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayCheck {
    pub id: String,
    pub ok: bool,
    pub note: String,
}

/// Re-verifies a stored certificate: every step must match the recomputed
/// one (claim, evidence, provenance), the condition steps must follow from
/// their own evidence, and the verdict and flags must be reproduced.
pub fn replay(stored: &Certificate, recomputed: &Certificate) -> Vec<ReplayCheck> {
    let mut out = Vec::new();
    for s in &stored.steps {
        let fresh = recomputed.step(&s.id);
        let mut note = match fresh {
            None => "step not reproduced".to_string(),
            Some(f) if f != s => "step differs from recomputation".to_string(),
            Some(_) => String::new(),
        };
        if note.is_empty() {
            if let Some(problem) = internal_check(s) {
                note = problem;
            }
        }
        out.push(ReplayCheck { id: s.id.clone(), ok: note.is_empty(), note });
    }
    let extra: Vec<&str> = recomputed.steps.iter().filter(|s| stored.step(&s.id).is_none()).map(|s| s.id.as_str()).collect();
    let same = stored.verdict == recomputed.verdict && stored.flags == recomputed.flags && extra.is_empty();
    out.push(ReplayCheck {
        id: "verdict".into(),
        ok: same,
        note: if same { String::new() } else { format!("verdict, flags or steps differ (extra steps {extra:?})") },
    });
    out
}

/// Checks that a condition step's claim follows from its recorded evidence.
fn internal_check(s: &Step) -> Option<String> {
    let result = s.evidence.get("check").and_then(|c| c.get("result")).and_then(Value::as_str);
    match s.id.as_str() {
        "condition-1" => {
            let entries = s.evidence.get("entries")?.as_array()?;
            let vals: Vec<&Value> = entries.iter().filter_map(|e| e.get("value")).collect();
            let any_pos = vals.iter().any(|v| v.as_u64().is_some_and(|x| x > 0));
            let any_unknown = vals.iter().any(|v| v.is_string());
            let expect = if any_pos { "fail" } else if any_unknown { "inconclusive" } else { "pass" };
            (result != Some(expect)).then(|| format!("condition 1 evidence implies {expect}"))
        }
        "condition-2" => {
            let ray = s.evidence.get("ray")?;
            if ray.is_null() {
                return (result != Some("inconclusive")).then(|| "condition 2 without ray data".to_string());
            }
            let inv: Vec<u64> = ray.get("invariants")?.as_array()?.iter().filter_map(Value::as_u64).collect();
            let exact = ray.get("exactness_verified").and_then(Value::as_bool) == Some(true);
            let expect = if !exact { "inconclusive" } else if is_cyclic(&inv) { "pass" } else { "fail" };
            (result != Some(expect)).then(|| format!("condition 2 evidence implies {expect}"))
        }
        _ => None,
    }
}
