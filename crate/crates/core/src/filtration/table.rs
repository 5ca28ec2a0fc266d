//! The Ext¹ pairing table between simple labels, with provenance, witnesses
//! and recorded hypotheses, and its fixture format:
//!
//! ```text
//! field <monic integer polynomial in x>
//! entry <A> <B> <0 | n | unknown> <computed | fixture | paper-assumed> <method…>
//! witness <A> <B> <description…>
//! hypothesis <id> <computed | fixture | paper-assumed> <statement…>
//! ```
//!
//! Entry (A, B) is Ext¹(A, B): extensions 0 → B → X → A → 0.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use super::{FiltrationObject, SplitFlag};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelClass {
    Etale,
    Multiplicative,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleLabel {
    pub label: String,
    pub class: LabelClass,
    pub dual: String,
}

impl SimpleLabel {
    pub fn new(label: &str, class: LabelClass, dual: &str) -> Self {
        SimpleLabel { label: label.into(), class, dual: dual.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtValue {
    Zero,
    Positive(u32),
    Unknown,
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Zero => write!(f, "0"),
            ExtValue::Positive(d) => write!(f, "of dimension {d}"),
            ExtValue::Unknown => write!(f, "unknown"),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtValue::Zero => s.serialize_u32(0),
            ExtValue::Positive(d) => s.serialize_u32(*d),
            ExtValue::Unknown => s.serialize_str("unknown"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Computed,
    Fixture,
    PaperAssumed,
}

impl Provenance {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "computed" => Ok(Provenance::Computed),
            "fixture" => Ok(Provenance::Fixture),
            "paper-assumed" => Ok(Provenance::PaperAssumed),
            _ => Err(Error::Parse(format!("unknown provenance {s:?}"))),
        }
    }
}

/// A non-split extension of A by B, realized by a named object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub name: String,
    pub filtration: FiltrationObject,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtEntry {
    pub value: ExtValue,
    pub provenance: Provenance,
    pub method: String,
    pub witness: Option<Witness>,
}

impl ExtEntry {
    pub fn new(value: ExtValue, provenance: Provenance, method: &str) -> Self {
        ExtEntry { value, provenance, method: method.into(), witness: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub id: String,
    pub provenance: Provenance,
    pub statement: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtTable {
    pub simples: Vec<SimpleLabel>,
    #[serde(serialize_with = "serialize_entries")]
    entries: BTreeMap<(String, String), ExtEntry>,
    pub hypotheses: Vec<Hypothesis>,
}

#[derive(Serialize)]
struct EntryRow<'a> {
    a: &'a str,
    b: &'a str,
    #[serde(flatten)]
    entry: &'a ExtEntry,
}

fn serialize_entries<S: Serializer>(m: &BTreeMap<(String, String), ExtEntry>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|((a, b), entry)| EntryRow { a, b, entry }))
}

/// The field a fixture is for, from its `field` record.
pub fn fixture_field(text: &str) -> Option<&str> {
    text.lines().map(str::trim).find_map(|l| l.strip_prefix("field ")).map(str::trim)
}

impl ExtTable {
    /// Empty table over the given simples; every dual must be listed.
    pub fn new(simples: Vec<SimpleLabel>) -> Result<Self> {
        for s in &simples {
            let d = simples
                .iter()
                .find(|x| x.label == s.dual)
                .ok_or_else(|| Error::InvalidInput(format!("dual {} of {} is not a simple", s.dual, s.label)))?;
            if d.dual != s.label {
                return Err(Error::InvalidInput(format!("duality is not an involution at {}", s.label)));
            }
        }
        Ok(ExtTable { simples, entries: BTreeMap::new(), hypotheses: vec![] })
    }

    pub fn simple(&self, label: &str) -> Option<&SimpleLabel> {
        self.simples.iter().find(|s| s.label == label)
    }

    pub fn dual_of(&self, label: &str) -> Option<&str> {
        self.simple(label).map(|s| s.dual.as_str())
    }

    fn require(&self, label: &str) -> Result<()> {
        match self.simple(label) {
            Some(_) => Ok(()),
            None => Err(Error::InvalidInput(format!("unknown simple label {label}"))),
        }
    }

    /// Stores an entry; a witness must be a non-split [B, A].
    pub fn set(&mut self, a: &str, b: &str, entry: ExtEntry) -> Result<()> {
        self.require(a)?;
        self.require(b)?;
        if let Some(w) = &entry.witness {
            if w.filtration.pieces != [b.to_string(), a.to_string()] || w.filtration.flags != [SplitFlag::NonSplit] {
                return Err(Error::InvalidInput(format!("witness {} is not a non-split extension of {a} by {b}", w.name)));
            }
            if entry.value == ExtValue::Zero {
                return Err(Error::InvalidInput(format!("witness {} for a vanishing Ext¹({a}, {b})", w.name)));
            }
        }
        let key = (a.to_string(), b.to_string());
        let old = self.entries.insert(key.clone(), entry);
        if let Err(e) = self.check_coherence() {
            match old {
                Some(o) => self.entries.insert(key, o),
                None => self.entries.remove(&key),
            };
            return Err(e);
        }
        Ok(())
    }

    pub fn entry(&self, a: &str, b: &str) -> Option<&ExtEntry> {
        self.entries.get(&(a.to_string(), b.to_string()))
    }

    pub fn value(&self, a: &str, b: &str) -> ExtValue {
        self.entry(a, b).map_or(ExtValue::Unknown, |e| e.value)
    }

    /// Ext¹(A, B) = 0, directly or through Ext¹(B*, A*) = 0.
    pub fn is_known_zero(&self, a: &str, b: &str) -> bool {
        if self.value(a, b) == ExtValue::Zero {
            return true;
        }
        match (self.dual_of(b), self.dual_of(a)) {
            (Some(bd), Some(ad)) => self.value(bd, ad) == ExtValue::Zero,
            _ => false,
        }
    }

    /// The entry deciding Ext¹(A, B) after duality, if any is known.
    pub fn resolved(&self, a: &str, b: &str) -> ExtValue {
        match self.value(a, b) {
            ExtValue::Unknown => match (self.dual_of(b), self.dual_of(a)) {
                (Some(bd), Some(ad)) => self.value(bd, ad),
                _ => ExtValue::Unknown,
            },
            v => v,
        }
    }

    /// Known entries agree with their duals.
    pub fn check_coherence(&self) -> Result<()> {
        for ((a, b), e) in &self.entries {
            let (bd, ad) = (self.dual_of(b).expect("validated"), self.dual_of(a).expect("validated"));
            let other = self.value(bd, ad);
            let clash = matches!(
                (e.value, other),
                (ExtValue::Zero, ExtValue::Positive(_)) | (ExtValue::Positive(_), ExtValue::Zero)
            ) || matches!((e.value, other), (ExtValue::Positive(x), ExtValue::Positive(y)) if x != y);
            if clash {
                return Err(Error::InvalidInput(format!("Ext¹({a}, {b}) and Ext¹({bd}, {ad}) disagree under duality")));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(String, String), &ExtEntry)> {
        self.entries.iter()
    }

    pub fn hypothesis(&self, id: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.id == id)
    }

    /// Reads entries, witnesses and hypotheses for the given simples.
    pub fn parse_fixture(text: &str, simples: Vec<SimpleLabel>) -> Result<Self> {
        let mut t = ExtTable::new(simples)?;
        let mut witnesses = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: {line:?}", n + 1));
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "entry" => {
                    if words.len() < 6 {
                        return Err(bad("entry needs labels, value, provenance and method"));
                    }
                    let value = match words[3] {
                        "unknown" => ExtValue::Unknown,
                        "0" => ExtValue::Zero,
                        d => ExtValue::Positive(d.parse().map_err(|_| bad("bad value"))?),
                    };
                    let prov = Provenance::parse(words[4])?;
                    t.set(words[1], words[2], ExtEntry::new(value, prov, &words[5..].join(" ")))?;
                }
                "witness" => {
                    if words.len() < 4 {
                        return Err(bad("witness needs labels and a description"));
                    }
                    witnesses.push((words[1].to_string(), words[2].to_string(), words[3..].join(" ")));
                }
                "hypothesis" => {
                    if words.len() < 4 {
                        return Err(bad("hypothesis needs an id, provenance and statement"));
                    }
                    t.hypotheses.push(Hypothesis {
                        id: words[1].into(),
                        provenance: Provenance::parse(words[2])?,
                        statement: words[3..].join(" "),
                    });
                }
                "field" => {}
                _ => return Err(bad("unknown record")),
            }
        }
        for (a, b, name) in witnesses {
            let mut e = t.entry(&a, &b).cloned().ok_or_else(|| Error::Parse(format!("witness for Ext¹({a}, {b}) without an entry")))?;
            let filtration = FiltrationObject { pieces: vec![b.clone(), a.clone()], flags: vec![SplitFlag::NonSplit] };
            e.witness = Some(Witness { name, filtration });
            t.set(&a, &b, e)?;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simples() -> Vec<SimpleLabel> {
        vec![
            SimpleLabel::new("Z/2Z", LabelClass::Etale, "mu_2"),
            SimpleLabel::new("G_pi", LabelClass::Other, "G_pibar"),
            SimpleLabel::new("G_pibar", LabelClass::Other, "G_pi"),
            SimpleLabel::new("mu_2", LabelClass::Multiplicative, "Z/2Z"),
        ]
    }

    #[test]
    fn fixture_round_trip() {
        let text = "# test\nentry mu_2 Z/2Z 1 paper-assumed product of the two order-2 schemes\n\
                    witness mu_2 Z/2Z G_pi x G_pibar\nhypothesis annihilation paper-assumed killed by 2\n";
        let t = ExtTable::parse_fixture(text, simples()).unwrap();
        let e = t.entry("mu_2", "Z/2Z").unwrap();
        assert_eq!(e.value, ExtValue::Positive(1));
        assert_eq!(e.witness.as_ref().unwrap().name, "G_pi x G_pibar");
        assert_eq!(t.value("G_pi", "Z/2Z"), ExtValue::Unknown);
        assert_eq!(t.hypothesis("annihilation").unwrap().provenance, Provenance::PaperAssumed);
        // μ₂* = Z/2Z, so the entry is self-dual
        assert_eq!(t.resolved("mu_2", "Z/2Z"), ExtValue::Positive(1));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(ExtTable::new(vec![SimpleLabel::new("Z/2Z", LabelClass::Etale, "mu_2")]).is_err());
        let mut t = ExtTable::new(simples()).unwrap();
        assert!(t.set("G_rho", "Z/2Z", ExtEntry::new(ExtValue::Zero, Provenance::Computed, "x")).is_err());
        t.set("G_pi", "Z/2Z", ExtEntry::new(ExtValue::Zero, Provenance::Computed, "x")).unwrap();
        // the dual entry Ext¹(μ₂, G_pibar) must agree
        assert!(t.is_known_zero("mu_2", "G_pibar"));
        assert!(t.set("mu_2", "G_pibar", ExtEntry::new(ExtValue::Positive(1), Provenance::Computed, "x")).is_err());
        assert_eq!(t.value("mu_2", "G_pibar"), ExtValue::Unknown);
        assert!(ExtTable::parse_fixture("witness mu_2 Z/2Z x\n", simples()).is_err());
        assert!(ExtTable::parse_fixture("entry mu_2 Z/2Z 0 guessed x\n", simples()).is_err());
        assert!(ExtTable::parse_fixture("entry mu_2 Z/2Z 0 fixture x\nwitness mu_2 Z/2Z y\n", simples()).is_err());
    }
}
