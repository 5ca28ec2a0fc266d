//! Filtrations of finite flat objects by simple labels, an Ext¹ pairing
//! table, and the rewriting rules that move pieces past each other when the
//! relevant Ext¹ groups vanish.
//!
//! A filtration [J₁, …, J_n] lists the simple subquotients bottom-up: J₁ is
//! a subobject. Adjacent pieces [b, a] may be swapped to [a, b] when
//! Ext¹(a, b) = 0, since the length-two subquotient is then a × b.

pub mod model;
pub mod table;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub use model::{model_check, ModelReport, Quiver, MAX_MODEL_DIMENSION};
pub use table::{fixture_field, ExtEntry, ExtTable, ExtValue, Hypothesis, LabelClass, Provenance, SimpleLabel, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitFlag {
    Split,
    NonSplit,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationObject {
    pub pieces: Vec<String>,
    /// One flag per adjacent pair (pieces[i], pieces[i + 1]).
    pub flags: Vec<SplitFlag>,
}

impl FiltrationObject {
    pub fn new(pieces: Vec<String>) -> Self {
        let flags = vec![SplitFlag::Unknown; pieces.len().saturating_sub(1)];
        FiltrationObject { pieces, flags }
    }

    pub fn from_labels(labels: &[&str]) -> Self {
        Self::new(labels.iter().map(|s| s.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Swaps pieces i and i + 1; the pair becomes a split product.
    fn swap(&mut self, i: usize) {
        self.pieces.swap(i, i + 1);
        self.flags[i] = SplitFlag::Split;
        if i > 0 {
            self.flags[i - 1] = SplitFlag::Unknown;
        }
        if i + 1 < self.flags.len() {
            self.flags[i + 1] = SplitFlag::Unknown;
        }
    }
}

fn check_labels(j: &FiltrationObject, t: &ExtTable) -> Result<()> {
    match j.pieces.iter().find(|p| t.simple(p).is_none()) {
        Some(p) => Err(Error::InvalidInput(format!("unknown simple label {p}"))),
        None => Ok(()),
    }
}

/// Whether A occurs among the pieces of J.
pub fn admits(j: &FiltrationObject, a: &str, t: &ExtTable) -> Result<bool> {
    check_labels(j, t)?;
    if t.simple(a).is_none() {
        return Err(Error::InvalidInput(format!("unknown simple label {a}")));
    }
    Ok(j.pieces.iter().any(|p| p == a))
}

/// Hypothesis check: Ext¹(A, B) known to vanish for every other piece B.
fn require_zero_ext(j: &FiltrationObject, a: &str, t: &ExtTable) -> Result<()> {
    for b in j.pieces.iter().filter(|b| *b != a) {
        if !t.is_known_zero(a, b) {
            return Err(Error::Precondition(format!(
                "Ext¹({a}, {b}) is {}; cannot move {a} below {b}",
                t.value(a, b)
            )));
        }
    }
    Ok(())
}

/// A filtration of the same object with A as the first piece, so A is a
/// subobject. Requires Ext¹(A, B) = 0 for every other piece B.
pub fn force_subobject(j: &FiltrationObject, a: &str, t: &ExtTable) -> Result<FiltrationObject> {
    if !admits(j, a, t)? {
        return Err(Error::Precondition(format!("the filtration does not admit {a}")));
    }
    require_zero_ext(j, a, t)?;
    let mut out = j.clone();
    let pos = out.pieces.iter().position(|p| p == a).expect("admitted");
    for i in (0..pos).rev() {
        out.swap(i);
    }
    Ok(out)
}

/// Splits J into a subobject admitting only A and a quotient not admitting A.
pub fn isotypic_split(j: &FiltrationObject, a: &str, t: &ExtTable) -> Result<(FiltrationObject, FiltrationObject)> {
    check_labels(j, t)?;
    require_zero_ext(j, a, t)?;
    let mut out = j.clone();
    // stable bubble: each A moves below every non-A piece in front of it
    let mut front = 0;
    for k in 0..out.len() {
        if out.pieces[k] == a {
            for i in (front..k).rev() {
                out.swap(i);
            }
            front += 1;
        }
    }
    let sub = FiltrationObject { pieces: out.pieces[..front].to_vec(), flags: out.flags[..front.saturating_sub(1)].to_vec() };
    let rest_flags = if front < out.len() { out.flags[front.min(out.flags.len())..].to_vec() } else { vec![] };
    let rest = FiltrationObject { pieces: out.pieces[front..].to_vec(), flags: rest_flags };
    Ok((sub, rest))
}

/// Reversed pieces, each replaced by its Cartier dual.
pub fn dual_filtration(j: &FiltrationObject, t: &ExtTable) -> Result<FiltrationObject> {
    check_labels(j, t)?;
    let pieces = j.pieces.iter().rev().map(|p| t.dual_of(p).expect("checked").to_string()).collect();
    let flags = j.flags.iter().rev().copied().collect();
    Ok(FiltrationObject { pieces, flags })
}

/// The pairs (T, E) with T non-étale and E étale whose Ext¹ is not known zero.
pub fn condition_one_gaps(t: &ExtTable) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for a in t.simples.iter().filter(|s| s.class != LabelClass::Etale) {
        for e in t.simples.iter().filter(|s| s.class == LabelClass::Etale) {
            if !t.is_known_zero(&a.label, &e.label) {
                out.push((a.label.clone(), e.label.clone()));
            }
        }
    }
    out
}

/// J = J_sub then J_quot with J_quot étale and J_sub admitting no étale
/// piece. Dualizes, moves the (multiplicative) duals of the étale pieces
/// below everything else, and dualizes back.
pub fn etale_decomposition(j: &FiltrationObject, t: &ExtTable) -> Result<(FiltrationObject, FiltrationObject)> {
    check_labels(j, t)?;
    if let Some((a, e)) = condition_one_gaps(t).into_iter().next() {
        return Err(Error::Precondition(format!("Ext¹({a}, {e}) is {}; the étale part cannot be split off", t.value(&a, &e))));
    }
    let d = dual_filtration(j, t)?;
    let is_dual_etale = |p: &str| t.dual_of(p).and_then(|x| t.simple(x)).is_some_and(|s| s.class == LabelClass::Etale);
    let mut out = d.clone();
    let mut front = 0;
    for k in 0..out.len() {
        if is_dual_etale(&out.pieces[k]) {
            for i in (front..k).rev() {
                // [x, m] → [m, x] needs Ext¹(m, x) = 0, the dual of Ext¹(x*, m*) = 0
                let (x, m) = (&out.pieces[i], &out.pieces[i + 1]);
                if !is_dual_etale(x) && !t.is_known_zero(m, x) {
                    return Err(Error::Precondition(format!("Ext¹({m}, {x}) is not known to vanish")));
                }
                out.swap(i);
            }
            front += 1;
        }
    }
    let back = dual_filtration(&out, t)?;
    let cut = back.len() - front;
    let sub = FiltrationObject::new(back.pieces[..cut].to_vec());
    let quot = FiltrationObject::new(back.pieces[cut..].to_vec());
    Ok((sub, quot))
}

/// Counts of étale and multiplicative pieces and the point-count lower
/// bounds ℓ^n and ℓ^m they force at an inert prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointCountBound {
    pub etale: usize,
    pub multiplicative: usize,
    pub etale_bound: String,
    pub multiplicative_bound: String,
}

pub fn point_count_bound(j: &FiltrationObject, t: &ExtTable, ell: u64, conditions_certified: bool) -> Result<PointCountBound> {
    if !conditions_certified {
        return Err(Error::Precondition("point counts need both conditions certified".into()));
    }
    check_labels(j, t)?;
    let count = |c: LabelClass| j.pieces.iter().filter(|p| t.simple(p).is_some_and(|s| s.class == c)).count();
    let (n, m) = (count(LabelClass::Etale), count(LabelClass::Multiplicative));
    let pow = |e: usize| num_bigint::BigUint::from(ell).pow(e as u32).to_string();
    Ok(PointCountBound { etale: n, multiplicative: m, etale_bound: pow(n), multiplicative_bound: pow(m) })
}

/// Multiset of pieces, for invariance checks.
pub fn piece_counts(j: &FiltrationObject) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for p in &j.pieces {
        *m.entry(p.clone()).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(l: &[&str]) -> FiltrationObject {
        FiltrationObject::from_labels(l)
    }

    fn pieces(j: &FiltrationObject) -> Vec<&str> {
        j.pieces.iter().map(String::as_str).collect()
    }

    /// Z/2Z étale, μ₂ multiplicative, Ext¹(μ₂, Z/2Z) = 0.
    fn inert_table() -> ExtTable {
        let mut t = ExtTable::new(vec![
            SimpleLabel::new("Z/2Z", LabelClass::Etale, "mu_2"),
            SimpleLabel::new("mu_2", LabelClass::Multiplicative, "Z/2Z"),
        ])
        .unwrap();
        t.set("mu_2", "Z/2Z", ExtEntry::new(ExtValue::Zero, Provenance::Fixture, "test")).unwrap();
        t
    }

    fn split_table() -> ExtTable {
        ExtTable::new(vec![
            SimpleLabel::new("Z/2Z", LabelClass::Etale, "mu_2"),
            SimpleLabel::new("G_pi", LabelClass::Other, "G_pibar"),
            SimpleLabel::new("G_pibar", LabelClass::Other, "G_pi"),
            SimpleLabel::new("mu_2", LabelClass::Multiplicative, "Z/2Z"),
        ])
        .unwrap()
    }

    #[test]
    fn admits_examples() {
        let t = inert_table();
        assert!(admits(&f(&["Z/2Z", "mu_2"]), "mu_2", &t).unwrap());
        assert!(!admits(&f(&["mu_2"]), "Z/2Z", &t).unwrap());
        let s = split_table();
        assert!(admits(&f(&["G_pi", "Z/2Z", "G_pibar"]), "G_pibar", &s).unwrap());
        assert!(admits(&f(&["G_rho"]), "Z/2Z", &s).is_err());
    }

    #[test]
    fn force_examples() {
        let t = inert_table();
        assert_eq!(pieces(&force_subobject(&f(&["Z/2Z", "mu_2"]), "mu_2", &t).unwrap()), vec!["mu_2", "Z/2Z"]);
        assert_eq!(pieces(&force_subobject(&f(&["mu_2"]), "mu_2", &t).unwrap()), vec!["mu_2"]);
        let j = force_subobject(&f(&["Z/2Z", "Z/2Z", "mu_2"]), "mu_2", &t).unwrap();
        assert_eq!(pieces(&j), vec!["mu_2", "Z/2Z", "Z/2Z"]);
        assert_eq!(j.flags[0], SplitFlag::Split);
        // Ext¹(Z/2Z, μ₂) unknown blocks the other direction, naming the pair
        let e = force_subobject(&f(&["mu_2", "Z/2Z"]), "Z/2Z", &t).unwrap_err();
        assert!(e.to_string().contains("Ext¹(Z/2Z, mu_2)"), "{e}");
    }

    #[test]
    fn isotypic_examples() {
        let t = inert_table();
        let (a, r) = isotypic_split(&f(&["mu_2", "Z/2Z", "mu_2"]), "mu_2", &t).unwrap();
        assert_eq!((pieces(&a), pieces(&r)), (vec!["mu_2", "mu_2"], vec!["Z/2Z"]));
        let (a, r) = isotypic_split(&f(&["mu_2", "mu_2"]), "mu_2", &t).unwrap();
        assert_eq!((pieces(&a), r.len()), (vec!["mu_2", "mu_2"], 0));
        let (a, r) = isotypic_split(&f(&["Z/2Z"]), "mu_2", &t).unwrap();
        assert_eq!((a.len(), pieces(&r)), (0, vec!["Z/2Z"]));
    }

    #[test]
    fn etale_examples() {
        let t = inert_table();
        let (s, q) = etale_decomposition(&f(&["Z/2Z", "mu_2", "Z/2Z"]), &t).unwrap();
        assert_eq!((pieces(&s), pieces(&q)), (vec!["mu_2"], vec!["Z/2Z", "Z/2Z"]));
        let (s, q) = etale_decomposition(&f(&["Z/2Z", "Z/2Z"]), &t).unwrap();
        assert_eq!((s.len(), q.len()), (0, 2));
        let (s, q) = etale_decomposition(&f(&["mu_2", "mu_2"]), &t).unwrap();
        assert_eq!((s.len(), q.len()), (2, 0));
        // idempotent
        let (s2, q2) = etale_decomposition(&FiltrationObject::new([s.pieces.clone(), q.pieces.clone()].concat()), &t).unwrap();
        assert_eq!((s2.pieces, q2.pieces), (s.pieces, q.pieces));
        // unknown Condition (1) entries block
        assert!(etale_decomposition(&f(&["Z/2Z"]), &split_table()).is_err());
    }

    #[test]
    fn duality_examples() {
        let t = inert_table();
        assert_eq!(pieces(&dual_filtration(&f(&["Z/2Z", "mu_2"]), &t).unwrap()), vec!["Z/2Z", "mu_2"]);
        let s = split_table();
        assert_eq!(pieces(&dual_filtration(&f(&["G_pi"]), &s).unwrap()), vec!["G_pibar"]);
    }

    #[test]
    fn point_counts() {
        let t = inert_table();
        let b = point_count_bound(&f(&["Z/2Z", "mu_2", "Z/2Z"]), &t, 2, true).unwrap();
        assert_eq!((b.etale, b.multiplicative, b.etale_bound.as_str(), b.multiplicative_bound.as_str()), (2, 1, "4", "2"));
        let b = point_count_bound(&f(&[]), &t, 2, true).unwrap();
        assert_eq!((b.etale, b.multiplicative, b.etale_bound.as_str()), (0, 0, "1"));
        // level-n pattern with k étale pieces per level: ℓ^{kn}
        let level = ["Z/2Z", "mu_2", "Z/2Z", "mu_2"];
        for n in 1..5 {
            let j: Vec<&str> = level.iter().copied().cycle().take(level.len() * n).collect();
            let b = point_count_bound(&f(&j), &t, 2, true).unwrap();
            assert_eq!(b.etale_bound, (1u64 << (2 * n)).to_string());
        }
        assert!(point_count_bound(&f(&["Z/2Z"]), &t, 2, false).is_err());
    }
}
