//! Finite groups as permutation groups, enumerated exhaustively.
//!
//! Products compose left to right: (g·h)(i) = h(g(i)). Groups given by a
//! multiplication table are turned into their right regular representation.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::exactalg::intfactor::factorize_u64;

pub type Perm = Vec<u16>;

/// Largest group the enumeration accepts.
pub const MAX_ORDER: usize = 10_000;

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub degree: usize,
    pub generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

fn compose(a: &[u16], b: &[u16]) -> Perm {
    a.iter().map(|&i| b[i as usize]).collect()
}

impl FiniteGroup {
    /// The group generated by the given permutations of {0, …, degree−1}.
    pub fn from_generators(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        for g in &generators {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&i| (i as usize) >= degree || std::mem::replace(&mut seen[i as usize], true)) {
                return Err(Error::InvalidInput("generator is not a permutation of the stated degree".into()));
            }
        }
        let id: Perm = (0..degree as u16).collect();
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &generators {
                let x = compose(&elements[i], g);
                if !index.contains_key(&x) {
                    if elements.len() == MAX_ORDER {
                        return Err(Error::InvalidInput(format!("group order exceeds {MAX_ORDER}")));
                    }
                    index.insert(x.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(x);
                }
            }
        }
        Ok(FiniteGroup { degree, generators, elements, index })
    }

    /// A group from its multiplication table (t[i][j] = i·j), after checking
    /// the axioms. Element 0 need not be the identity.
    pub fn from_table(t: &[Vec<usize>]) -> Result<Self> {
        let n = t.len();
        if n == 0 || t.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidInput("multiplication table is not square over its elements".into()));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| t[e][x] == x && t[x][e] == x))
            .ok_or_else(|| Error::InvalidInput("table has no identity".into()))?;
        for x in 0..n {
            if !(0..n).any(|y| t[x][y] == e) {
                return Err(Error::InvalidInput(format!("element {x} has no inverse")));
            }
            for y in 0..n {
                for z in 0..n {
                    if t[t[x][y]][z] != t[x][t[y][z]] {
                        return Err(Error::InvalidInput(format!("table is not associative at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        // right regular representation h ↦ h·g, with a greedy generating set
        let rho = |g: usize| -> Perm { (0..n).map(|h| t[h][g] as u16).collect() };
        let mut gens: Vec<Perm> = Vec::new();
        let mut reached: HashSet<usize> = HashSet::from([e]);
        for g in 0..n {
            if reached.contains(&g) {
                continue;
            }
            gens.push(rho(g));
            let mut frontier: Vec<usize> = reached.iter().copied().collect();
            while let Some(x) = frontier.pop() {
                for p in &gens {
                    let y = p[x] as usize;
                    if reached.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        Self::from_generators(n, gens)
    }

    pub fn trivial() -> Self {
        Self::from_generators(1, vec![]).expect("trivial group")
    }

    pub fn cyclic(n: usize) -> Self {
        let g: Perm = (0..n).map(|i| ((i + 1) % n) as u16).collect();
        Self::from_generators(n, vec![g]).expect("cyclic group")
    }

    /// Symmetry group of the n-gon, of order 2n, acting on its vertices.
    pub fn dihedral(n: usize) -> Self {
        let r: Perm = (0..n).map(|i| ((i + 1) % n) as u16).collect();
        let s: Perm = (0..n).map(|i| ((n - i) % n) as u16).collect();
        Self::from_generators(n, vec![r, s]).expect("dihedral group")
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n > 1 {
            let mut t: Perm = (0..n as u16).collect();
            t.swap(0, 1);
            let c: Perm = (0..n).map(|i| ((i + 1) % n) as u16).collect();
            gens = vec![t, c];
        }
        Self::from_generators(n.max(1), gens).expect("symmetric group")
    }

    /// (Z/p)^k acting on itself by translation.
    pub fn elementary_abelian(p: usize, k: u32) -> Self {
        let n = p.pow(k);
        let gens = (0..k)
            .map(|j| {
                let step = p.pow(j);
                (0..n).map(|x| {
                    let digit = (x / step) % p;
                    (x - digit * step + ((digit + 1) % p) * step) as u16
                })
                .collect()
            })
            .collect();
        Self::from_generators(n, gens).expect("elementary abelian group")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&compose(&self.elements[a], &self.elements[b])]
    }

    pub fn inv(&self, a: usize) -> usize {
        let p = &self.elements[a];
        let mut q = vec![0u16; p.len()];
        for (i, &j) in p.iter().enumerate() {
            q[j as usize] = i as u16;
        }
        self.index[&q]
    }

    /// Indices of the generators among the elements.
    pub fn generator_indices(&self) -> Vec<usize> {
        self.generators.iter().map(|g| self.index[g]).collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order()).any(|a| self.element_order(a) == self.order())
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.generator_indices();
        g.iter().all(|&a| g.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by the given elements, as sorted indices.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
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

    pub fn conjugate(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), x), g)
    }

    /// Conjugacy class of x.
    pub fn conjugacy_class(&self, x: usize) -> Vec<usize> {
        let gens = self.generator_indices();
        let mut seen = HashSet::from([x]);
        let mut out = vec![x];
        let mut i = 0;
        while i < out.len() {
            for &g in &gens {
                let y = self.conjugate(out[i], g);
                if seen.insert(y) {
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Smallest normal subgroup containing the given elements.
    pub fn normal_closure(&self, xs: &[usize]) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        for &x in xs {
            for y in self.conjugacy_class(x) {
                if !gens.contains(&y) {
                    gens.push(y);
                }
            }
        }
        self.closure(&gens)
    }

    pub fn is_normal(&self, h: &[usize]) -> bool {
        let set: HashSet<usize> = h.iter().copied().collect();
        let gens = self.generator_indices();
        h.iter().all(|&x| gens.iter().all(|&g| set.contains(&self.conjugate(x, g))))
    }

    /// [G, G], generated by commutators of all pairs.
    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let n = self.order();
        let mut comms: Vec<usize> = Vec::new();
        let mut seen = HashSet::new();
        for a in 0..n {
            for b in 0..n {
                let c = self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b));
                if seen.insert(c) {
                    comms.push(c);
                }
            }
        }
        self.closure(&comms)
    }

    /// G/N for a normal subgroup N, with coset multiplication table.
    pub fn quotient(&self, n: &[usize]) -> Result<FiniteGroup> {
        if !self.is_normal(n) {
            return Err(Error::Precondition("quotient by a subgroup that is not normal".into()));
        }
        FiniteGroup::from_table(&self.coset_table(n).0)
    }

    /// Coset multiplication table (cosets gN ordered by first element) and
    /// the coset index of every element.
    fn coset_table(&self, n: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut coset = vec![usize::MAX; self.order()];
        let mut reps = Vec::new();
        for g in 0..self.order() {
            if coset[g] == usize::MAX {
                for &x in n {
                    coset[self.mul(g, x)] = reps.len();
                }
                reps.push(g);
            }
        }
        let t = reps.iter().map(|&a| reps.iter().map(|&b| coset[self.mul(a, b)]).collect()).collect();
        (t, coset)
    }

    /// Image of every element in the group returned by `quotient(n)`.
    pub fn quotient_map(&self, n: &[usize], q: &FiniteGroup) -> Vec<usize> {
        let (t, coset) = self.coset_table(n);
        (0..self.order())
            .map(|g| {
                let c = coset[g];
                let perm: Perm = (0..t.len()).map(|h| t[h][c] as u16).collect();
                q.index[&perm]
            })
            .collect()
    }
}

/// Whether n is a power of the prime p (n ≥ 1).
pub fn is_power_of(n: usize, p: usize) -> bool {
    let mut n = n;
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// The prime of a nontrivial prime-power order.
pub fn prime_of_power(n: usize) -> Option<usize> {
    match factorize_u64(n as u64).as_slice() {
        [(p, _)] => Some(*p as usize),
        _ => None,
    }
}

/// The largest normal ℓ-subgroup O_ℓ(G): the union of the ℓ-elements whose
/// normal closure is an ℓ-group, saturated class by class.
pub fn ell_core(g: &FiniteGroup, ell: usize) -> Vec<usize> {
    let ell_part = {
        let mut n = g.order();
        let mut m = 1;
        while n % ell == 0 {
            n /= ell;
            m *= ell;
        }
        m
    };
    let mut core: Vec<usize> = vec![0];
    let mut done = vec![false; g.order()];
    for x in 0..g.order() {
        if done[x] || core.binary_search(&x).is_ok() {
            continue;
        }
        let class = g.conjugacy_class(x);
        for &c in &class {
            done[c] = true;
        }
        if !is_power_of(g.element_order(x), ell) {
            continue;
        }
        let mut gens = core.clone();
        gens.extend(class);
        let m = g.closure(&gens);
        if m.len() <= ell_part && is_power_of(m.len(), ell) {
            core = m;
        }
    }
    core
}
