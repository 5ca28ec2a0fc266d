//! Brute-force oracle for the rewriting rules: nilpotent representations of
//! a finite quiver over F_2. Vertices are the simple objects (each of order
//! 2), Ext¹(S_a, S_b) is the number of arrows a → b, and Cartier duality is
//! the transpose representation of the opposite quiver, matched to the
//! original through the vertex involution. Every object of order ≤ 2^d is
//! enumerated with all of its composition series.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{etale_decomposition, force_subobject, isotypic_split, FiltrationObject};
use super::table::{ExtEntry, ExtTable, ExtValue, LabelClass, Provenance, SimpleLabel};
use crate::error::{Error, Result};

/// Largest total dimension enumerated (objects of order ≤ 2^4).
pub const MAX_MODEL_DIMENSION: usize = 4;

#[derive(Clone, Debug)]
pub struct Quiver {
    pub vertices: Vec<SimpleLabel>,
    pub arrows: Vec<(usize, usize)>,
}

impl Quiver {
    /// Étale and multiplicative vertices with self-extensions and a
    /// non-split extension of Z/2Z by μ₂, plus a dual pair of other simples;
    /// no arrow into the étale vertex except its loop, so Condition (1) holds.
    pub fn standard() -> Self {
        Quiver {
            vertices: vec![
                SimpleLabel::new("Z/2Z", LabelClass::Etale, "mu_2"),
                SimpleLabel::new("mu_2", LabelClass::Multiplicative, "Z/2Z"),
                SimpleLabel::new("G_pi", LabelClass::Other, "G_pibar"),
                SimpleLabel::new("G_pibar", LabelClass::Other, "G_pi"),
            ],
            arrows: vec![(0, 1), (0, 0), (1, 1), (0, 2), (3, 1), (2, 3)],
        }
    }

    /// The standard quiver plus an arrow μ₂ → Z/2Z: Ext¹(μ₂, Z/2Z) ≠ 0.
    pub fn violating_condition_one() -> Self {
        let mut q = Self::standard();
        q.arrows.push((1, 0));
        q
    }

    fn index(&self, label: &str) -> usize {
        self.vertices.iter().position(|v| v.label == label).expect("vertex label")
    }

    /// The arrow set is carried to itself by a → b ↦ b* → a*.
    pub fn is_self_dual(&self) -> bool {
        let mut a: Vec<(usize, usize)> = self.arrows.clone();
        let mut b: Vec<(usize, usize)> = self
            .arrows
            .iter()
            .map(|&(x, y)| (self.index(&self.vertices[y].dual), self.index(&self.vertices[x].dual)))
            .collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    /// Ext¹ table read off the arrows.
    pub fn ext_table(&self) -> Result<ExtTable> {
        let mut t = ExtTable::new(self.vertices.clone())?;
        for (i, a) in self.vertices.iter().enumerate() {
            for (j, b) in self.vertices.iter().enumerate() {
                let n = self.arrows.iter().filter(|&&x| x == (i, j)).count() as u32;
                let v = if n == 0 { ExtValue::Zero } else { ExtValue::Positive(n) };
                t.set(&a.label, &b.label, ExtEntry::new(v, Provenance::Computed, "arrows of the model quiver"))?;
            }
        }
        Ok(t)
    }
}

/// A representation: dimension per vertex, coordinates in vertex blocks,
/// and each arrow as the images of the basis vectors (bitmasks).
#[derive(Clone, Debug)]
struct Rep {
    block: Vec<usize>,
    maps: Vec<Vec<u8>>,
}

impl Rep {
    fn dim(&self) -> usize {
        self.block.len()
    }

    fn apply(map: &[u8], v: u8) -> u8 {
        map.iter().enumerate().filter(|(i, _)| v >> i & 1 == 1).fold(0, |acc, (_, &m)| acc ^ m)
    }

    fn compose(f: &[u8], g: &[u8]) -> Vec<u8> {
        f.iter().map(|&x| Self::apply(g, x)).collect()
    }

    /// Every path of length d acts as zero.
    fn is_nilpotent(&self) -> bool {
        let d = self.dim();
        let mut words: BTreeSet<Vec<u8>> = self.maps.iter().cloned().collect();
        for _ in 1..d.max(1) {
            words = words.iter().flat_map(|w| self.maps.iter().map(move |m| Self::compose(w, m))).collect();
            words.retain(|w| w.iter().any(|&x| x != 0));
        }
        words.iter().all(|w| w.iter().all(|&x| x == 0))
    }

    fn block_mask(&self, v: usize) -> u8 {
        self.block.iter().enumerate().filter(|(_, &b)| b == v).fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

fn members(w: u16) -> impl Iterator<Item = u8> {
    (0u8..16).filter(move |&x| w >> x & 1 == 1)
}

/// All subspaces of F_2^d as bitsets over the 2^d vectors.
fn subspaces(d: usize) -> Vec<u16> {
    let mut seen: BTreeSet<u16> = BTreeSet::from([1]);
    let mut frontier = vec![1u16];
    while let Some(w) = frontier.pop() {
        for v in 0..(1u8 << d) {
            if w >> v & 1 == 1 {
                continue;
            }
            let mut next = w;
            for x in members(w) {
                next |= 1 << (x ^ v);
            }
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    seen.into_iter().collect()
}

fn dim_of(w: u16) -> usize {
    w.count_ones().trailing_zeros() as usize
}

/// Label sequences of all composition series of the representation.
fn composition_series(rep: &Rep, subs: &[u16], nv: usize) -> BTreeSet<Vec<usize>> {
    let d = rep.dim();
    let blocks: Vec<u8> = (0..nv).map(|v| rep.block_mask(v)).collect();
    let invariant: Vec<u16> = subs
        .iter()
        .copied()
        .filter(|&w| {
            members(w).all(|x| {
                blocks.iter().all(|&b| w >> (x & b) & 1 == 1) && rep.maps.iter().all(|m| w >> Rep::apply(m, x) & 1 == 1)
            })
        })
        .collect();
    let block_dims = |w: u16| -> Vec<usize> {
        blocks.iter().map(|&b| dim_of(members(w).filter(|&x| x & !b == 0).fold(0u16, |acc, x| acc | 1 << x))).collect()
    };
    let full: u16 = if d == 4 { u16::MAX } else { (1u16 << (1 << d)) - 1 };
    let mut out = BTreeSet::new();
    let mut stack: Vec<(u16, Vec<usize>)> = vec![(1, vec![])];
    while let Some((w, labels)) = stack.pop() {
        if w == full {
            out.insert(labels);
            continue;
        }
        let dw = block_dims(w);
        for &n in invariant.iter().filter(|&&n| n & w == w && dim_of(n) == dim_of(w) + 1) {
            let dn = block_dims(n);
            let v = (0..nv).find(|&v| dn[v] > dw[v]).expect("graded step");
            let mut l = labels.clone();
            l.push(v);
            stack.push((n, l));
        }
    }
    out
}

/// All nilpotent representations with total dimension ≤ max_dim.
fn representations(q: &Quiver, max_dim: usize) -> Vec<Rep> {
    let nv = q.vertices.len();
    let mut out = Vec::new();
    let mut dims = vec![0usize; nv];
    loop {
        let total: usize = dims.iter().sum();
        if total >= 1 && total <= max_dim {
            let block: Vec<usize> = (0..nv).flat_map(|v| std::iter::repeat(v).take(dims[v])).collect();
            let offsets: Vec<usize> = (0..nv).map(|v| dims[..v].iter().sum()).collect();
            let bits: Vec<usize> = q.arrows.iter().map(|&(a, b)| dims[a] * dims[b]).collect();
            let total_bits: usize = bits.iter().sum();
            for code in 0u64..(1u64 << total_bits) {
                let mut c = code;
                let mut maps = Vec::with_capacity(q.arrows.len());
                for &(a, b) in &q.arrows {
                    let mut m = vec![0u8; total];
                    for i in 0..dims[a] {
                        let mut img = 0u8;
                        for j in 0..dims[b] {
                            if c & 1 == 1 {
                                img |= 1 << (offsets[b] + j);
                            }
                            c >>= 1;
                        }
                        m[offsets[a] + i] = img;
                    }
                    maps.push(m);
                }
                let rep = Rep { block: block.clone(), maps };
                if rep.is_nilpotent() {
                    out.push(rep);
                }
            }
        }
        // odometer over dimension vectors with entries ≤ max_dim
        let mut i = 0;
        loop {
            if i == nv {
                return out;
            }
            dims[i] += 1;
            if dims[i] <= max_dim && dims.iter().sum::<usize>() <= max_dim {
                break;
            }
            dims[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ModelReport {
    pub lemma: String,
    pub objects: usize,
    pub filtrations: usize,
    /// Rewrites performed (hypotheses held).
    pub applied: usize,
    /// Rewrites refused because a hypothesis was not established.
    pub refused: usize,
    pub counterexamples: Vec<String>,
    /// Objects with no filtration having all étale pieces on top.
    pub blocked_instances: usize,
}

/// Checks one rewriting rule against every composition series of every
/// model object up to the dimension cap: each rewrite it performs must be
/// realized by an actual composition series of the same object.
pub fn model_check(lemma: &str, max_dim: usize, quiver: &Quiver) -> Result<ModelReport> {
    if max_dim > MAX_MODEL_DIMENSION {
        return Err(Error::InvalidInput(format!("model dimension {max_dim} above {MAX_MODEL_DIMENSION}")));
    }
    if !["force_subobject", "isotypic_split", "etale_decomposition"].contains(&lemma) {
        return Err(Error::InvalidInput(format!("unknown lemma {lemma}")));
    }
    let table = quiver.ext_table()?;
    let nv = quiver.vertices.len();
    let names = |s: &[usize]| -> Vec<String> { s.iter().map(|&v| quiver.vertices[v].label.clone()).collect() };
    let is_etale = |v: usize| quiver.vertices[v].class == LabelClass::Etale;
    let mut subs_by_dim: Vec<Vec<u16>> = (0..=max_dim).map(subspaces).collect();
    let mut report = ModelReport { lemma: lemma.into(), ..Default::default() };
    for rep in representations(quiver, max_dim) {
        let subs = std::mem::take(&mut subs_by_dim[rep.dim()]);
        let series = composition_series(&rep, &subs, nv);
        subs_by_dim[rep.dim()] = subs;
        report.objects += 1;
        report.filtrations += series.len();
        let realized: BTreeSet<Vec<String>> = series.iter().map(|s| names(s)).collect();
        if lemma == "etale_decomposition" && !series.iter().any(|s| s.windows(2).all(|w| !is_etale(w[0]) || is_etale(w[1]))) {
            report.blocked_instances += 1;
        }
        for s in &series {
            let j = FiltrationObject::new(names(s));
            let mut outputs: Vec<Result<Vec<String>>> = Vec::new();
            match lemma {
                "force_subobject" => {
                    let distinct: BTreeSet<&String> = j.pieces.iter().collect();
                    for a in distinct {
                        outputs.push(force_subobject(&j, a, &table).map(|o| o.pieces));
                    }
                }
                "isotypic_split" => {
                    for v in &quiver.vertices {
                        outputs.push(isotypic_split(&j, &v.label, &table).map(|(a, r)| [a.pieces, r.pieces].concat()));
                    }
                }
                _ => outputs.push(etale_decomposition(&j, &table).map(|(a, r)| [a.pieces, r.pieces].concat())),
            }
            for o in outputs {
                match o {
                    Ok(p) => {
                        report.applied += 1;
                        if !realized.contains(&p) {
                            report.counterexamples.push(format!("{:?} rewritten to unrealized {:?}", j.pieces, p));
                        }
                    }
                    Err(Error::Precondition(_)) => report.refused += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_counts() {
        // Gaussian binomials over F_2
        assert_eq!(subspaces(1).len(), 2);
        assert_eq!(subspaces(2).len(), 5);
        assert_eq!(subspaces(3).len(), 16);
        assert_eq!(subspaces(4).len(), 67);
    }

    #[test]
    fn quivers_are_self_dual() {
        assert!(Quiver::standard().is_self_dual());
        assert!(Quiver::violating_condition_one().is_self_dual());
        let t = Quiver::standard().ext_table().unwrap();
        assert_eq!(t.value("Z/2Z", "mu_2"), ExtValue::Positive(1));
        assert_eq!(t.value("mu_2", "Z/2Z"), ExtValue::Zero);
    }

    #[test]
    fn non_split_extension_has_one_series() {
        // E → M with the arrow nonzero: only [mu_2, Z/2Z]
        let q = Quiver::standard();
        let rep = Rep { block: vec![0, 1], maps: vec![vec![0b10, 0], vec![0, 0], vec![0, 0], vec![0, 0], vec![0, 0], vec![0, 0]] };
        assert!(rep.is_nilpotent());
        let s = composition_series(&rep, &subspaces(2), 4);
        assert_eq!(s, BTreeSet::from([vec![1, 0]]));
        let split = Rep { block: vec![0, 1], maps: vec![vec![0, 0]; 6] };
        assert_eq!(composition_series(&split, &subspaces(2), 4).len(), 2);
        assert_eq!(q.vertices[1].label, "mu_2");
    }

    #[test]
    fn loops_must_be_nilpotent() {
        let rep = Rep { block: vec![0], maps: vec![vec![0], vec![1], vec![0], vec![0], vec![0], vec![0]] };
        assert!(!rep.is_nilpotent());
    }

    #[test]
    fn small_cap_runs_clean() {
        for lemma in ["force_subobject", "isotypic_split", "etale_decomposition"] {
            let r = model_check(lemma, 2, &Quiver::standard()).unwrap();
            assert!(r.counterexamples.is_empty(), "{lemma}: {:?}", r.counterexamples);
            assert!(r.applied > 0);
        }
        assert!(model_check("other", 2, &Quiver::standard()).is_err());
    }
}
