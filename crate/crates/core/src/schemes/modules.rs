//! Simple F_ℓ[G]-modules by splitting the regular module of G/O_ℓ(G).
//!
//! Matrices act on row vectors from the right, matching the left-to-right
//! group product: v·M(g)·M(h) = v·M(gh).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::fp::{factor_mod_p, invmod, mulmod, FpPoly};
use crate::exactalg::linalg::{fp_kernel, fp_left_kernel, fp_rref};

use super::groups::{ell_core, FiniteGroup};

/// Largest G/O_ℓ(G) whose regular module is decomposed.
pub const MAX_QUOTIENT_ORDER: usize = 64;
/// Random algebra elements tried per splitting attempt.
const SPLIT_TRIES: usize = 400;

pub type FpMat = Vec<Vec<u64>>;

#[derive(Clone, Debug, Serialize)]
pub struct GaloisModule {
    pub ell: u64,
    pub dimension: usize,
    /// Matrix of each generator of the group, in generator order.
    pub action: Vec<FpMat>,
    /// Multiplicity as a composition factor of the regular module of G/O_ℓ(G).
    pub regular_multiplicity: usize,
    #[serde(skip)]
    pub group: FiniteGroup,
}

fn identity(d: usize) -> FpMat {
    (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect()
}

pub fn mat_mul(a: &FpMat, b: &FpMat, p: u64) -> FpMat {
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = vec![0u64; m];
            for (k, &x) in row.iter().enumerate() {
                if x != 0 {
                    for (o, &y) in out.iter_mut().zip(&b[k]) {
                        *o = (*o + mulmod(x, y, p)) % p;
                    }
                }
            }
            out
        })
        .collect()
}

fn vec_mat(v: &[u64], m: &FpMat, p: u64) -> Vec<u64> {
    mat_mul(&vec![v.to_vec()], m, p).pop().expect("one row")
}

fn transpose(m: &FpMat) -> FpMat {
    let c = m.first().map_or(0, Vec::len);
    (0..c).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn mat_inv(m: &FpMat, p: u64) -> Option<FpMat> {
    let d = m.len();
    let aug: Vec<Vec<u64>> = m.iter().zip(identity(d)).map(|(r, e)| r.iter().copied().chain(e).collect()).collect();
    let (r, piv) = fp_rref(&aug, p);
    if piv.len() < d || piv[d - 1] != d - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[d..].to_vec()).collect())
}

/// Echelon basis of the smallest subspace containing `seeds` and stable
/// under every matrix.
pub fn spin(seeds: &[Vec<u64>], gens: &[FpMat], p: u64) -> Vec<Vec<u64>> {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut queue: Vec<Vec<u64>> = seeds.to_vec();
    let mut rank = 0;
    while let Some(v) = queue.pop() {
        let mut trial = basis.clone();
        trial.push(v.clone());
        let (r, piv) = fp_rref(&trial, p);
        if piv.len() > rank {
            rank = piv.len();
            basis = r;
            for g in gens {
                queue.push(vec_mat(&v, g, p));
            }
        }
    }
    basis
}

enum Split {
    Irreducible,
    Sub(Vec<Vec<u64>>),
}

/// Characteristic polynomial via reduction to Hessenberg form.
fn charpoly(m: &FpMat, p: u64) -> FpPoly {
    let n = m.len();
    let mut h = m.clone();
    let sub = |a: u64, b: u64| (a + p - b) % p;
    for c in 1..n.saturating_sub(1) {
        if h[c][c - 1] == 0 {
            if let Some(i) = (c + 1..n).find(|&i| h[i][c - 1] != 0) {
                h.swap(i, c);
                for row in h.iter_mut() {
                    row.swap(i, c);
                }
            }
        }
        if h[c][c - 1] == 0 {
            continue;
        }
        let tinv = invmod(h[c][c - 1], p);
        for i in c + 1..n {
            let u = mulmod(h[i][c - 1], tinv, p);
            if u == 0 {
                continue;
            }
            for j in 0..n {
                h[i][j] = sub(h[i][j], mulmod(u, h[c][j], p));
            }
            for row in h.iter_mut() {
                row[c] = (row[c] + mulmod(u, row[i], p)) % p;
            }
        }
    }
    let mut polys = vec![FpPoly::one(p)];
    for k in 1..=n {
        let lin = FpPoly::new(p, vec![sub(0, h[k - 1][k - 1]), 1]);
        let mut pk = lin.mul(&polys[k - 1]);
        let mut t = 1u64;
        for i in 1..k {
            t = mulmod(t, h[k - i][k - i - 1], p);
            let c = mulmod(t, h[k - i - 1][k - 1], p);
            pk = pk.sub(&polys[k - i - 1].scale(c));
        }
        polys.push(pk);
    }
    polys.pop().expect("nonempty")
}

fn eval_at_matrix(f: &FpPoly, a: &FpMat, p: u64) -> FpMat {
    let d = a.len();
    let mut r = vec![vec![0u64; d]; d];
    for &c in f.coeffs().iter().rev() {
        r = mat_mul(&r, a, p);
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = (row[i] + c) % p;
        }
    }
    r
}

/// Holt–Rees irreducibility test: for an algebra element A and an
/// irreducible factor f of its characteristic polynomial with
/// dim ker f(A) = deg f, the module is irreducible as soon as one kernel
/// vector spins to everything under the action and one under the transposed
/// action; any proper spin yields a submodule.
fn split(gens: &[FpMat], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Result<Split> {
    if d == 1 {
        return Ok(Split::Irreducible);
    }
    let gt: Vec<FpMat> = gens.iter().map(transpose).collect();
    let mut words: Vec<FpMat> = vec![identity(d)];
    words.extend(gens.iter().cloned());
    for _ in 0..SPLIT_TRIES {
        // extend the pool of words by a random product
        if !gens.is_empty() {
            let a = &words[rng.gen_range(0..words.len())];
            let b = &gens[rng.gen_range(0..gens.len())];
            let w = mat_mul(a, b, p);
            words.push(w);
        }
        let mut a = vec![vec![0u64; d]; d];
        for w in &words {
            let c = rng.gen_range(0..p);
            if c != 0 {
                for (ar, wr) in a.iter_mut().zip(w) {
                    for (x, &y) in ar.iter_mut().zip(wr) {
                        *x = (*x + mulmod(c, y, p)) % p;
                    }
                }
            }
        }
        for (f, _) in factor_mod_p(&charpoly(&a, p))? {
            let fa = eval_at_matrix(&f, &a, p);
            let ker = fp_left_kernel(&fa, p);
            let s = spin(&ker[..1], gens, p);
            if s.len() < d {
                return Ok(Split::Sub(s));
            }
            let kt = fp_kernel(&fa, d, p);
            let w = spin(&kt[..1], &gt, p);
            if w.len() < d {
                // the annihilator of a transposed-invariant subspace is invariant
                let cols: FpMat = transpose(&w);
                return Ok(Split::Sub(spin(&fp_left_kernel(&cols, p), gens, p)));
            }
            if ker.len() == f.deg() {
                return Ok(Split::Irreducible);
            }
        }
    }
    Err(Error::Inconclusive(format!("irreducibility of a {d}-dimensional module not decided")))
}

/// Matrices of the sub- and quotient actions for an invariant subspace.
fn sub_quotient(gens: &[FpMat], sub: &[Vec<u64>], d: usize, p: u64) -> (Vec<FpMat>, Vec<FpMat>) {
    let k = sub.len();
    let mut basis: FpMat = sub.to_vec();
    for i in 0..d {
        let mut e = vec![0u64; d];
        e[i] = 1;
        let mut trial = basis.clone();
        trial.push(e.clone());
        if fp_rref(&trial, p).1.len() == trial.len() {
            basis.push(e);
        }
    }
    let inv = mat_inv(&basis, p).expect("completed basis");
    let conj: Vec<FpMat> = gens.iter().map(|g| mat_mul(&mat_mul(&basis, g, p), &inv, p)).collect();
    let subs = conj.iter().map(|m| m[..k].iter().map(|r| r[..k].to_vec()).collect()).collect();
    let quots = conj.iter().map(|m| m[k..].iter().map(|r| r[k..].to_vec()).collect()).collect();
    (subs, quots)
}

fn composition_factors(gens: Vec<FpMat>, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Vec<FpMat>>) -> Result<()> {
    match split(&gens, d, p, rng)? {
        Split::Irreducible => out.push(gens),
        Split::Sub(s) => {
            let k = s.len();
            let (a, b) = sub_quotient(&gens, &s, d, p);
            composition_factors(a, k, p, rng, out)?;
            composition_factors(b, d - k, p, rng, out)?;
        }
    }
    Ok(())
}

/// Whether two simple modules of equal dimension are isomorphic: a nonzero
/// X with M1(g)·X = X·M2(g) for every generator.
pub fn isomorphic(m1: &[FpMat], m2: &[FpMat], p: u64) -> bool {
    let d = m1.first().map_or(0, Vec::len);
    if m2.first().map_or(0, Vec::len) != d {
        return false;
    }
    if d == 0 {
        return true;
    }
    let mut rows = Vec::new();
    for (a, b) in m1.iter().zip(m2) {
        for i in 0..d {
            for j in 0..d {
                // Σ_k a[i][k] X[k][j] − Σ_k X[i][k] b[k][j] = 0
                let mut row = vec![0u64; d * d];
                for k in 0..d {
                    row[k * d + j] = (row[k * d + j] + a[i][k]) % p;
                    row[i * d + k] = (row[i * d + k] + p - b[k][j] % p) % p;
                }
                rows.push(row);
            }
        }
    }
    !fp_kernel(&rows, d * d, p).is_empty()
}

/// Matrices of every element of `g` under a representation given on its
/// generators, checking that it is a homomorphism.
pub fn element_matrices(g: &FiniteGroup, action: &[FpMat], p: u64) -> Result<Vec<FpMat>> {
    let d = action.first().map_or(0, Vec::len);
    let gens = g.generator_indices();
    if gens.len() != action.len() {
        return Err(Error::InvalidInput("one matrix per generator required".into()));
    }
    let mut mats: Vec<Option<FpMat>> = vec![None; g.order()];
    mats[0] = Some(identity(d));
    let mut queue = vec![0usize];
    while let Some(x) = queue.pop() {
        let mx = mats[x].clone().expect("visited");
        for (&s, ms) in gens.iter().zip(action) {
            let y = g.mul(x, s);
            let my = mat_mul(&mx, ms, p);
            match &mats[y] {
                Some(m) if *m != my => {
                    return Err(Error::Precondition("generator matrices do not define a homomorphism".into()))
                }
                Some(_) => {}
                None => {
                    mats[y] = Some(my);
                    queue.push(y);
                }
            }
        }
    }
    Ok(mats.into_iter().map(|m| m.expect("group generated")).collect())
}

impl GaloisModule {
    /// Checks the action against the group law on all elements.
    pub fn is_homomorphism(&self) -> bool {
        element_matrices(&self.group, &self.action, self.ell).is_ok()
    }

    /// A proper nonzero invariant subspace found by spinning random vectors.
    pub fn random_invariant_subspace(&self, trials: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<u64>>> {
        for _ in 0..trials {
            let v: Vec<u64> = (0..self.dimension).map(|_| rng.gen_range(0..self.ell)).collect();
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let s = spin(&[v], &self.action, self.ell);
            if s.len() < self.dimension {
                return Some(s);
            }
        }
        None
    }
}

/// The simple F_ℓ[G]-modules up to isomorphism. They are inflated from
/// G/O_ℓ(G), since a normal ℓ-subgroup acts trivially on every simple
/// module; the regular module of the quotient is split into composition
/// factors with proven-irreducible constituents.
pub fn simple_modules(g: &FiniteGroup, ell: u64, seed: u64) -> Result<Vec<GaloisModule>> {
    let core = ell_core(g, ell as usize);
    let q = g.quotient(&core)?;
    if q.order() > MAX_QUOTIENT_ORDER {
        return Err(Error::InvalidInput(format!("G/O_ℓ(G) has order {} > {MAX_QUOTIENT_ORDER}", q.order())));
    }
    let n = q.order();
    let regular: Vec<FpMat> = q
        .generator_indices()
        .iter()
        .map(|&s| {
            let mut m = vec![vec![0u64; n]; n];
            for (h, row) in m.iter_mut().enumerate() {
                row[q.mul(h, s)] = 1;
            }
            m
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    composition_factors(regular, n, ell, &mut rng, &mut factors)?;
    let mut classes: Vec<(Vec<FpMat>, usize)> = Vec::new();
    for f in factors {
        match classes.iter_mut().find(|(c, _)| isomorphic(c, &f, ell)) {
            Some(c) => c.1 += 1,
            None => classes.push((f, 1)),
        }
    }
    classes.sort_by_key(|(c, _)| c.first().map_or(0, Vec::len));
    // inflate to G: the matrix of each generator of G is that of its image
    let image = g.quotient_map(&core, &q);
    let mut out = Vec::new();
    for (c, mult) in classes {
        let d = c.first().map_or(1, Vec::len);
        let all = if c.is_empty() { vec![identity(d); q.order()] } else { element_matrices(&q, &c, ell)? };
        let action = g.generator_indices().iter().map(|&s| all[image[s]].clone()).collect();
        out.push(GaloisModule { ell, dimension: d, action, regular_multiplicity: mult, group: g.clone() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(ms: &[GaloisModule]) -> Vec<(usize, usize)> {
        ms.iter().map(|m| (m.dimension, m.regular_multiplicity)).collect()
    }

    /// Every nonzero vector spins to the whole space.
    fn brute_simple(m: &GaloisModule) -> bool {
        let d = m.dimension;
        let total = (m.ell as usize).pow(d as u32);
        (1..total).all(|mut code| {
            let v: Vec<u64> = (0..d)
                .map(|_| {
                    let x = (code % m.ell as usize) as u64;
                    code /= m.ell as usize;
                    x
                })
                .collect();
            spin(&[v], &m.action, m.ell).len() == d
        })
    }

    #[test]
    fn charpoly_matches_cayley_hamilton() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2u64, 3, 7] {
            for d in 1..7 {
                let a: FpMat = (0..d).map(|_| (0..d).map(|_| rng.gen_range(0..p)).collect()).collect();
                let f = charpoly(&a, p);
                assert_eq!(f.deg(), d);
                assert!(eval_at_matrix(&f, &a, p).iter().flatten().all(|&x| x == 0));
            }
        }
        // companion matrix of x^2 + 1 over F_3
        assert_eq!(charpoly(&vec![vec![0, 1], vec![2, 0]], 3), FpPoly::new(3, vec![1, 0, 1]));
    }

    #[test]
    fn klein_four_has_only_the_trivial_module() {
        let g = FiniteGroup::elementary_abelian(2, 2);
        let ms = simple_modules(&g, 2, 1).unwrap();
        assert_eq!(dims(&ms), vec![(1, 1)]);
        assert!(ms[0].action.iter().all(|m| m == &vec![vec![1]]));
    }

    #[test]
    fn s3_mod_two() {
        let g = FiniteGroup::symmetric(3);
        let ms = simple_modules(&g, 2, 7).unwrap();
        // F2[S3] has composition factors 1, 1, 2, 2
        assert_eq!(dims(&ms), vec![(1, 2), (2, 2)]);
        for m in &ms {
            assert!(m.is_homomorphism());
            assert!(brute_simple(m));
        }
    }

    #[test]
    fn s3_mod_three_and_trivial_group() {
        let ms = simple_modules(&FiniteGroup::symmetric(3), 3, 3).unwrap();
        assert_eq!(dims(&ms), vec![(1, 1), (1, 1)]);
        assert!(!isomorphic(&ms[0].action, &ms[1].action, 3));
        let t = simple_modules(&FiniteGroup::trivial(), 2, 0).unwrap();
        assert_eq!(dims(&t), vec![(1, 1)]);
    }

    #[test]
    fn dimension_count_and_random_search() {
        for (g, ell) in [
            (FiniteGroup::symmetric(4), 2u64),
            (FiniteGroup::symmetric(4), 3),
            (FiniteGroup::dihedral(5), 2),
            (FiniteGroup::cyclic(7), 2),
            (FiniteGroup::dihedral(6), 3),
        ] {
            let ms = simple_modules(&g, ell, 11).unwrap();
            let q = g.order() / ell_core(&g, ell as usize).len();
            assert_eq!(ms.iter().map(|m| m.dimension * m.regular_multiplicity).sum::<usize>(), q);
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for m in &ms {
                assert!(m.is_homomorphism());
                assert!(m.random_invariant_subspace(100, &mut rng).is_none());
            }
        }
        // Z/7 over F2: x^7 − 1 = (x − 1)(x³ + x + 1)(x³ + x² + 1)
        let ms = simple_modules(&FiniteGroup::cyclic(7), 2, 0).unwrap();
        assert_eq!(dims(&ms), vec![(1, 1), (3, 1), (3, 1)]);
    }
}
