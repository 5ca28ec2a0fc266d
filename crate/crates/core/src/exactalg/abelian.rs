//! Finite abelian groups: quotients Z^k / relations with discrete logs, and
//! structure discovery for groups given by a multiplication closure.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::linalg::q_inverse;
use super::matrix::{smith_normal_form, IntMatrix};
use super::poly::int_rat;
use crate::error::{Error, Result};

/// Z^k modulo the row lattice of a relation matrix, in Smith coordinates.
#[derive(Clone, Debug)]
pub struct AbelianQuotient {
    /// Nontrivial invariant factors d_1 | d_2 | …; zero marks a free summand.
    pub invariants: Vec<BigInt>,
    /// Column transform: Smith coordinates of x are x·V.
    v: IntMatrix,
    /// Indices of the Smith coordinates that survive (d ≠ 1).
    keep: Vec<usize>,
    /// Images of the surviving Smith generators in the original coordinates.
    gens: Vec<Vec<BigInt>>,
    rank: usize,
}

impl AbelianQuotient {
    pub fn new(relations: &IntMatrix, k: usize) -> Self {
        if k == 0 {
            return AbelianQuotient { invariants: vec![], v: IntMatrix::zeros(0, 0), keep: vec![], gens: vec![], rank: 0 };
        }
        let rel = if relations.rows() == 0 { IntMatrix::zeros(1, k) } else { relations.clone() };
        let snf = smith_normal_form(&rel);
        let mut diag: Vec<BigInt> = snf.diagonal.clone();
        diag.resize(k, BigInt::zero());
        let keep: Vec<usize> = (0..k).filter(|&i| !diag[i].is_one()).collect();
        let vq: Vec<Vec<_>> = snf.v.to_rows().iter().map(|r| r.iter().map(int_rat).collect()).collect();
        let vinv = q_inverse(&vq).expect("unimodular");
        let gens = keep.iter().map(|&i| vinv[i].iter().map(|x| x.to_integer()).collect()).collect();
        AbelianQuotient { invariants: keep.iter().map(|&i| diag[i].clone()).collect(), v: snf.v, keep, gens, rank: k }
    }

    pub fn ngens(&self) -> usize {
        self.rank
    }

    /// Group order; `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.invariants.iter().any(Zero::is_zero) {
            return None;
        }
        Some(self.invariants.iter().fold(BigInt::one(), |a, d| a * d))
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariants.len() <= 1
    }

    /// Exponent of the group (lcm of invariants); `None` when infinite.
    pub fn exponent(&self) -> Option<BigInt> {
        self.order()?;
        Some(self.invariants.iter().fold(BigInt::one(), |a, d| a.lcm(d)))
    }

    /// Coordinates of x ∈ Z^k on the invariant generators, reduced.
    pub fn dlog(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.v.vec_mul(x);
        self.keep
            .iter()
            .zip(&self.invariants)
            .map(|(&i, d)| if d.is_zero() { y[i].clone() } else { y[i].mod_floor(d) })
            .collect()
    }

    /// Generator of the i-th invariant, in the original coordinates.
    pub fn generator(&self, i: usize) -> &[BigInt] {
        &self.gens[i]
    }

    pub fn is_zero_class(&self, x: &[BigInt]) -> bool {
        self.dlog(x).iter().all(Zero::is_zero)
    }

    /// All elements as reduced dlog vectors, in lexicographic order.
    pub fn elements(&self, cap: usize) -> Result<Vec<Vec<BigInt>>> {
        let ord = self.order().ok_or_else(|| Error::Precondition("infinite group".into()))?;
        if ord > BigInt::from(cap) {
            return Err(Error::Inconclusive(format!("group of order {ord} exceeds enumeration cap")));
        }
        let mut out = vec![vec![]];
        for d in &self.invariants {
            let d = d.to_usize().expect("bounded by cap");
            out = out
                .into_iter()
                .flat_map(|v: Vec<BigInt>| {
                    (0..d).map(move |a| {
                        let mut w = v.clone();
                        w.push(BigInt::from(a));
                        w
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

/// Abelian group generated inside a larger structure by closure: every
/// element reached is recorded with an exponent vector on the generators.
pub struct ClosureGroup<T> {
    pub gens: Vec<T>,
    pub table: HashMap<T, Vec<i64>>,
    pub relations: Vec<Vec<BigInt>>,
}

impl<T: Clone + Eq + Hash> ClosureGroup<T> {
    pub fn new(identity: T) -> Self {
        let mut table = HashMap::new();
        table.insert(identity, Vec::new());
        ClosureGroup { gens: Vec::new(), table, relations: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.table.contains_key(x)
    }

    /// Adds g as a generator (no-op if already in the group).
    pub fn add_generator(&mut self, g: T, mul: impl Fn(&T, &T) -> T, cap: usize) -> Result<()> {
        if self.contains(&g) {
            return Ok(());
        }
        let j = self.gens.len();
        let mut x = g.clone();
        let mut t = 1usize;
        let mut powers = vec![];
        while !self.contains(&x) {
            powers.push(x.clone());
            x = mul(&x, &g);
            t += 1;
            if t * self.table.len() > cap {
                return Err(Error::Inconclusive(format!("group closure exceeds cap {cap}")));
            }
        }
        let mut rel: Vec<BigInt> = self.table[&x].iter().map(|&c| -BigInt::from(c)).collect();
        rel.resize(j, BigInt::zero());
        rel.push(BigInt::from(t));
        self.relations.push(rel);
        let old: Vec<(T, Vec<i64>)> = self.table.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        for (i, p) in powers.iter().enumerate() {
            for (h, v) in &old {
                let mut w = v.clone();
                w.resize(j, 0);
                w.push(i as i64 + 1);
                self.table.insert(mul(p, h), w);
            }
        }
        for v in self.table.values_mut() {
            v.resize(j + 1, 0);
        }
        self.gens.push(g);
        Ok(())
    }

    /// Exponent vector of x on the generators.
    pub fn log(&self, x: &T) -> Option<Vec<BigInt>> {
        self.table.get(x).map(|v| {
            let mut w: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
            w.resize(self.gens.len(), BigInt::zero());
            w
        })
    }

    pub fn relation_matrix(&self) -> IntMatrix {
        let k = self.gens.len();
        let rows: Vec<Vec<BigInt>> = self
            .relations
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.resize(k, BigInt::zero());
                r
            })
            .collect();
        IntMatrix::from_big_rows(rows, k)
    }
}
