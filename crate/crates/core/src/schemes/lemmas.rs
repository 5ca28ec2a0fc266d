//! Two group-theoretic facts used to bound the Galois groups of torsion
//! fields, as checkable utilities: a p-group with cyclic abelianization is
//! cyclic, and a group acting faithfully on B, trivially on A ⊂ B and on
//! C = B/A, has order dividing #A^k when C is generated by k elements.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::matrix::{abelian_invariants, IntMatrix};

use super::groups::{prime_of_power, FiniteGroup, Perm};

/// Whether G/[G,G] is cyclic, for a p-group G.
pub fn check_cyclic_pgroup(g: &FiniteGroup) -> Result<bool> {
    if g.order() > 1 && prime_of_power(g.order()).is_none() {
        return Err(Error::InvalidInput(format!("order {} is not a prime power", g.order())));
    }
    let comm = g.commutator_subgroup();
    let index = g.order() / comm.len();
    let in_comm: HashSet<usize> = comm.into_iter().collect();
    // some coset of order equal to the index
    Ok((0..g.order()).any(|a| {
        let mut x = a;
        let mut k = 1;
        while !in_comm.contains(&x) {
            x = g.mul(x, a);
            k += 1;
        }
        k == index
    }))
}

/// A named group from the catalog fixture.
#[derive(Clone, Debug)]
pub struct CatalogGroup {
    pub name: String,
    pub group: FiniteGroup,
}

/// Parses multiplication tables:
///
/// ```text
/// group <name> <order>
/// <order rows of <order> integers>
/// end
/// ```
pub fn parse_group_catalog(text: &str) -> Result<Vec<CatalogGroup>> {
    let mut out = Vec::new();
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    while let Some(head) = lines.next() {
        let parts: Vec<&str> = head.split_whitespace().collect();
        let [ "group", name, order ] = parts.as_slice() else {
            return Err(Error::Parse(format!("expected a group header, got {head:?}")));
        };
        let n: usize = order.parse().map_err(|_| Error::Parse(format!("bad order in {head:?}")))?;
        let mut table = Vec::with_capacity(n);
        for _ in 0..n {
            let row = lines.next().ok_or_else(|| Error::Parse(format!("table of {name} truncated")))?;
            let row: Vec<usize> = row
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad entry in table of {name}"))))
                .collect::<Result<_>>()?;
            table.push(row);
        }
        if lines.next() != Some("end") {
            return Err(Error::Parse(format!("table of {name} not terminated by end")));
        }
        let group = FiniteGroup::from_table(&table).map_err(|e| Error::Parse(format!("{name}: {e}")))?;
        out.push(CatalogGroup { name: name.to_string(), group });
    }
    Ok(out)
}

/// A finite abelian group B = ⊕ Z/n_i with a subgroup A given by generators.
/// Elements of B are indexed in mixed radix over the n_i.
#[derive(Clone, Debug, Serialize)]
pub struct AbelianExtension {
    pub b: Vec<u64>,
    pub a_generators: Vec<Vec<u64>>,
}

impl AbelianExtension {
    pub fn order(&self) -> usize {
        self.b.iter().product::<u64>() as usize
    }

    pub fn coords(&self, mut i: usize) -> Vec<u64> {
        self.b
            .iter()
            .map(|&n| {
                let x = (i % n as usize) as u64;
                i /= n as usize;
                x
            })
            .collect()
    }

    pub fn index(&self, x: &[u64]) -> usize {
        let mut i = 0;
        for (&v, &n) in x.iter().zip(&self.b).rev() {
            i = i * n as usize + (v % n) as usize;
        }
        i
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.coords(x), self.coords(y));
        self.index(&a.iter().zip(&b).map(|(p, q)| p + q).collect::<Vec<_>>())
    }

    /// Elements of A, as indices.
    pub fn a_elements(&self) -> Vec<usize> {
        let gens: Vec<usize> = self.a_generators.iter().map(|g| self.index(g)).collect();
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            for &g in &gens {
                let y = self.add(out[i], g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Invariants of C = B/A.
    pub fn c_invariants(&self) -> Vec<u64> {
        let r = self.b.len();
        let mut rows: Vec<Vec<BigInt>> = (0..r)
            .map(|i| (0..r).map(|j| BigInt::from(if i == j { self.b[i] } else { 0 })).collect())
            .collect();
        rows.extend(self.a_generators.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()));
        abelian_invariants(&IntMatrix::from_big_rows(rows, r))
            .into_iter()
            .map(|d| d.to_u64().expect("finite quotient"))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityCheck {
    pub group_order: usize,
    /// Order of the image of G in Aut(B).
    pub image_order: usize,
    pub a_order: usize,
    /// Number of generators of C.
    pub k: usize,
    pub faithful: bool,
    /// #image divides #A^k.
    pub divides: bool,
}

impl DivisibilityCheck {
    /// The lemma's conclusion for a faithful action.
    pub fn holds(&self) -> bool {
        self.faithful && self.divides
    }
}

/// Checks #G | #A^k for G acting on B through the given images of its
/// generators (permutations of B's elements). The hypotheses (action by
/// automorphisms, trivial on A and on B/A) are verified; a non-faithful
/// action is reported, not rejected.
pub fn check_divisibility_lemma(ext: &AbelianExtension, g: &FiniteGroup, action: &[Perm]) -> Result<DivisibilityCheck> {
    let n = ext.order();
    if action.len() != g.generators.len() || action.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidInput("one permutation of B per generator of G required".into()));
    }
    let a = ext.a_elements();
    let a_set: HashSet<usize> = a.iter().copied().collect();
    for s in action {
        for x in 0..n {
            for y in 0..n {
                if s[ext.add(x, y)] as usize != ext.add(s[x] as usize, s[y] as usize) {
                    return Err(Error::Precondition("action is not by group automorphisms".into()));
                }
            }
            // σ(x) − x ∈ A: trivial on C
            let neg: Vec<u64> = ext.coords(x).iter().zip(&ext.b).map(|(v, m)| (m - v) % m).collect();
            if !a_set.contains(&ext.add(s[x] as usize, ext.index(&neg))) {
                return Err(Error::Precondition("action is not trivial on B/A".into()));
            }
        }
        if a.iter().any(|&x| s[x] as usize != x) {
            return Err(Error::Precondition("action is not trivial on A".into()));
        }
    }
    let image = FiniteGroup::from_generators(n, action.to_vec())?;
    // the generator images must define a homomorphism G → Aut(B)
    let gens = g.generator_indices();
    let mut img: Vec<Option<Perm>> = vec![None; g.order()];
    img[0] = Some((0..n as u16).collect());
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        let px = img[x].clone().expect("visited");
        for (&s, ps) in gens.iter().zip(action) {
            let y = g.mul(x, s);
            let py: Perm = px.iter().map(|&i| ps[i as usize]).collect();
            match &img[y] {
                Some(q) if *q != py => return Err(Error::Precondition("generator images do not define an action".into())),
                Some(_) => {}
                None => {
                    img[y] = Some(py);
                    stack.push(y);
                }
            }
        }
    }
    let k = ext.c_invariants().len();
    let bound = (a.len() as u128).pow(k as u32);
    Ok(DivisibilityCheck {
        group_order: g.order(),
        image_order: image.order(),
        a_order: a.len(),
        k,
        faithful: image.order() == g.order(),
        divides: bound % image.order() as u128 == 0,
    })
}

/// Finite abelian groups of order at most `max_order` with at most three
/// invariant factors, as invariant lists n_1 | n_2 | ….
pub fn small_abelian_groups(max_order: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for n1 in 2..=max_order {
        out.push(vec![n1]);
        for n2 in (n1..=max_order / n1).filter(|n2| n2 % n1 == 0) {
            out.push(vec![n1, n2]);
            for n3 in (n2..=max_order / (n1 * n2)).filter(|n3| n3 % n2 == 0) {
                out.push(vec![n1, n2, n3]);
            }
        }
    }
    out
}

/// All subgroups of B generated by at most two elements, deduplicated.
pub fn subgroups(b: &[u64]) -> Vec<AbelianExtension> {
    let base = AbelianExtension { b: b.to_vec(), a_generators: vec![] };
    let n = base.order();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for x in 0..n {
        for y in x..n {
            let ext = AbelianExtension { b: b.to_vec(), a_generators: vec![base.coords(x), base.coords(y)] };
            if seen.insert(ext.a_elements()) {
                out.push(ext);
            }
        }
    }
    out
}

/// Every automorphism of B that is trivial on A and on B/A, found by trying
/// each assignment of generator images σ(e_i) ∈ e_i + A.
pub fn stabilizing_automorphisms(ext: &AbelianExtension) -> Vec<Perm> {
    let n = ext.order();
    let r = ext.b.len();
    let a = ext.a_elements();
    let unit = |i: usize| {
        let mut v = vec![0u64; r];
        v[i] = 1;
        v
    };
    let mut out = Vec::new();
    let mut choice = vec![0usize; r];
    loop {
        let images: Vec<Vec<u64>> = (0..r).map(|i| ext.coords(ext.add(ext.index(&unit(i)), a[choice[i]]))).collect();
        // well defined: n_i · σ(e_i) = 0
        let ok = images.iter().zip(&ext.b).all(|(v, &m)| v.iter().zip(&ext.b).all(|(&x, &q)| (x * m) % q == 0));
        if ok {
            let perm: Perm = (0..n)
                .map(|x| {
                    let c = ext.coords(x);
                    let v: Vec<u64> =
                        (0..r).map(|j| (0..r).map(|i| c[i] * images[i][j]).sum::<u64>()).collect();
                    ext.index(&v) as u16
                })
                .collect();
            let bijective = perm.iter().collect::<HashSet<_>>().len() == n;
            if bijective && a.iter().all(|&x| perm[x] as usize == x) {
                out.push(perm);
            }
        }
        let mut i = 0;
        loop {
            if i == r {
                return out;
            }
            choice[i] += 1;
            if choice[i] < a.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// A divisibility instance: the extension, the acting group and the images
/// of its generators.
#[derive(Clone, Debug)]
pub struct DivisibilityInstance {
    pub extension: AbelianExtension,
    pub group: FiniteGroup,
    pub action: Vec<Perm>,
}

/// Exhaustively constructed instances with #B ≤ `max_order`: for every B
/// and every subgroup A, the full stabilizer of the filtration and each of
/// its cyclic subgroups (nontrivial groups only).
pub fn divisibility_instances(max_order: u64) -> Vec<DivisibilityInstance> {
    let mut out = Vec::new();
    for b in small_abelian_groups(max_order) {
        for ext in subgroups(&b) {
            let a = ext.a_elements().len();
            if a == 1 || a == ext.order() || (a as u64).pow(b.len() as u32) > 1 << 16 {
                continue;
            }
            let auts = stabilizing_automorphisms(&ext);
            if auts.len() <= 1 {
                continue;
            }
            let full = FiniteGroup::from_generators(ext.order(), auts.clone()).expect("automorphisms");
            let mut cyclic_seen: HashSet<Vec<usize>> = HashSet::new();
            for s in auts.iter().skip(1) {
                let c = FiniteGroup::from_generators(ext.order(), vec![s.clone()]).expect("cyclic");
                let key: Vec<usize> = {
                    let mut v: Vec<usize> = (0..c.order()).map(|i| full.index_of(c.element(i)).expect("subgroup")).collect();
                    v.sort_unstable();
                    v
                };
                if cyclic_seen.insert(key) {
                    out.push(DivisibilityInstance { extension: ext.clone(), action: c.generators.clone(), group: c });
                }
            }
            out.push(DivisibilityInstance { extension: ext.clone(), action: full.generators.clone(), group: full });
        }
    }
    out
}
