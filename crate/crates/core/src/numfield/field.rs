//! Absolute number fields of degree at most 8 on an integral basis.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::fp::{mulmod, reduce_big};
use crate::exactalg::interval::{root_interval, CDisk, RatInterval, PREC};
use crate::exactalg::intfactor::factorize;
use crate::exactalg::linalg::{fp_left_kernel, q_det, q_inverse, q_vec_mul, QMat};
use crate::exactalg::matrix::{hnf, IntMatrix};
use crate::exactalg::poly::{int_rat, rat, rat_to_f64, QPoly};

use super::roots::{certified_roots, factor_over_q};

pub const MAX_DEGREE: usize = 8;

/// Element of a number field, as rational coordinates on the integral basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn int_coords(&self) -> Option<Vec<BigInt>> {
        self.coords.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        FieldElement { coords: c.iter().map(int_rat).collect() }
    }

    /// Sum of absolute values of numerators and denominators; used for
    /// canonical tie-breaking among generators.
    pub fn height(&self) -> BigInt {
        self.coords.iter().map(|c| c.numer().abs() + c.denom()).sum()
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

/// Multiplication data for an order given by a Z-basis in power-basis coordinates.
#[derive(Clone)]
pub(crate) struct Order {
    pub basis: QMat,
    pub inv: QMat,
    pub table: Vec<Vec<Vec<BigInt>>>,
}

impl Order {
    pub fn new(f: &QPoly, basis: QMat) -> Self {
        let n = f.deg();
        let inv = q_inverse(&basis).expect("order basis is nonsingular");
        let polys: Vec<QPoly> = basis.iter().map(|r| QPoly::new(r.clone())).collect();
        let mut table = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let prod = polys[i].mul(&polys[j]).rem(f);
                let mut pc = prod.coeffs().to_vec();
                pc.resize(n, BigRational::zero());
                let c = q_vec_mul(&pc, &inv);
                let ints: Vec<BigInt> = c
                    .iter()
                    .map(|x| {
                        assert!(x.is_integer(), "basis does not span an order");
                        x.to_integer()
                    })
                    .collect();
                table[i][j] = ints.clone();
                table[j][i] = ints;
            }
        }
        Order { basis, inv, table }
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = self.n();
        let mut out = vec![BigInt::zero(); n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let k = ai * bj;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    *o += &k * t;
                }
            }
        }
        out
    }

    pub fn mul_mod(&self, a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = self.n();
        let mut out = vec![0u64; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let k = mulmod(ai, bj, p);
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    *o = (*o + mulmod(k, reduce_big(t, p), p)) % p;
                }
            }
        }
        out
    }

    fn unit(&self) -> Vec<BigInt> {
        let n = self.n();
        let mut e = vec![BigRational::zero(); n];
        e[0] = BigRational::one();
        q_vec_mul(&e, &self.inv).into_iter().map(|x| x.to_integer()).collect()
    }

    fn pow_mod(&self, a: &[u64], e: u64, p: u64) -> Vec<u64> {
        let mut result: Vec<u64> = self.unit().iter().map(|x| reduce_big(x, p)).collect();
        let mut base = a.to_vec();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_mod(&result, &base, p);
            }
            base = self.mul_mod(&base, &base, p);
            e >>= 1;
        }
        result
    }

    /// The p-radical {x : x^(p^j) ∈ pO for large j}, as an HNF basis in order coordinates.
    pub fn radical(&self, p: u64) -> IntMatrix {
        let n = self.n();
        let mut q = p;
        while (q as usize) < n {
            q *= p;
        }
        let frob: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut e = vec![0u64; n];
                e[i] = 1;
                self.pow_mod(&e, q, p)
            })
            .collect();
        let ker = fp_left_kernel(&frob, p);
        let mut rows: Vec<Vec<BigInt>> = ker.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        for i in 0..n {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::from(p);
            rows.push(r);
        }
        hnf(&IntMatrix::from_big_rows(rows, n)).nonzero_rows()
    }

    /// The ring {x : x·I ⊆ I} for the p-radical I, or `None` if it equals the order.
    fn enlarge_at(&self, p: u64) -> Option<QMat> {
        let n = self.n();
        let rad = self.radical(p);
        let rad_rows: Vec<Vec<BigRational>> =
            rad.to_rows().into_iter().map(|r| r.iter().map(int_rat).collect()).collect();
        let rad_inv = q_inverse(&rad_rows).expect("radical has full rank");
        // rows: unknown index i; columns: (j, k) coordinates of ω_i β_j in the β basis
        let mut m: Vec<Vec<u64>> = vec![Vec::with_capacity(n * n); n];
        for (i, row) in m.iter_mut().enumerate() {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            for j in 0..n {
                let prod = self.mul(&e, rad.row(j));
                let pr: Vec<BigRational> = prod.iter().map(int_rat).collect();
                let y = q_vec_mul(&pr, &rad_inv);
                for c in y {
                    debug_assert!(c.is_integer());
                    row.push(reduce_big(&c.to_integer(), p));
                }
            }
        }
        let ker = fp_left_kernel(&m, p);
        if ker.is_empty() {
            return None;
        }
        let mut rows: Vec<Vec<BigInt>> = ker.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        for i in 0..n {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::from(p);
            rows.push(r);
        }
        let u = hnf(&IntMatrix::from_big_rows(rows, n)).nonzero_rows();
        let pinv = BigRational::new(BigInt::one(), BigInt::from(p));
        let new_basis: QMat = u
            .to_rows()
            .iter()
            .map(|r| {
                let v: Vec<BigRational> = r.iter().map(|x| int_rat(x) * &pinv).collect();
                q_vec_mul(&v, &self.basis)
            })
            .collect();
        Some(new_basis)
    }
}

/// Canonical basis: ω_i involves only θ^0..θ^i, with positive leading entry,
/// lower entries reduced; the first element is 1.
fn canonical_basis(basis: &QMat) -> QMat {
    let n = basis.len();
    let den = basis
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    // reverse columns so the row HNF becomes lower-triangular in θ-powers
    let rows: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|r| (0..n).rev().map(|j| (&r[j] * int_rat(&den)).to_integer()).collect())
        .collect();
    let h = hnf(&IntMatrix::from_big_rows(rows, n));
    (0..n)
        .rev()
        .map(|i| {
            (0..n)
                .map(|j| BigRational::new(h[(i, n - 1 - j)].clone(), den.clone()))
                .collect()
        })
        .collect()
}

/// A number field Q[x]/(f) with its maximal order.
#[derive(Clone)]
pub struct NumberField {
    poly: QPoly,
    order: Order,
    disc: BigInt,
    poly_disc: BigInt,
    index: BigInt,
    r1: usize,
    r2: usize,
    /// Certified roots of f: r1 real ones, then r2 with positive imaginary part,
    /// then their conjugates.
    roots: Vec<CDisk>,
    /// σ_j(ω_k) for the r1 + r2 embeddings.
    omega_emb: Vec<Vec<CDisk>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({}, disc {})", self.poly, self.disc)
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

/// Builds the field Q[x]/(f) for a monic irreducible integer polynomial f.
pub fn make_field(f: &QPoly) -> Result<NumberField> {
    let n = f.degree().ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    if n == 0 {
        return Err(Error::InvalidInput("constant polynomial".into()));
    }
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    if !f.is_monic() || !f.is_integral() {
        return Err(Error::InvalidInput(format!("{f} is not monic with integer coefficients")));
    }
    if !f.is_squarefree() {
        return Err(Error::Reducible(format!("{f} has a repeated factor")));
    }
    let factors = factor_over_q(f)?;
    if factors.len() > 1 {
        return Err(Error::Reducible(format!("{f} = {}", factors.iter().map(|g| format!("({g})")).collect::<Vec<_>>().join(""))));
    }
    let poly_disc = f.discriminant().to_integer();
    let mut basis: QMat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for (p, e) in factorize(&poly_disc) {
        if e < 2 {
            continue;
        }
        let p = p.to_u64().ok_or_else(|| Error::InvalidInput("index prime too large".into()))?;
        loop {
            let ord = Order::new(f, basis.clone());
            match ord.enlarge_at(p) {
                Some(b) => basis = b,
                None => break,
            }
        }
    }
    let basis = canonical_basis(&basis);
    let order = Order::new(f, basis);
    // disc(O) = disc(f) · det(B)^2 where B expresses the basis in powers of θ
    let det = q_det(&order.basis);
    let disc_q = int_rat(&poly_disc) * &det * &det;
    if !disc_q.is_integer() {
        return Err(Error::InvalidInput("non-integral discriminant".into()));
    }
    let disc = disc_q.to_integer();
    let index = det.recip().to_integer().abs();
    let (r1, roots) = certified_roots(f)?;
    let r2 = (n - r1) / 2;
    let mut field = NumberField {
        poly: f.clone(),
        order,
        disc,
        poly_disc,
        index,
        r1,
        r2,
        roots,
        omega_emb: Vec::new(),
    };
    field.omega_emb = (0..r1 + r2)
        .map(|j| {
            field
                .order
                .basis
                .iter()
                .map(|row| eval_disk(row, &field.roots[j]))
                .collect()
        })
        .collect();
    let trace_det = field.trace_form_det();
    if trace_det != field.disc {
        return Err(Error::InvalidInput(format!(
            "discriminant check failed: {} vs trace form {}",
            field.disc, trace_det
        )));
    }
    Ok(field)
}

fn eval_disk(power_coords: &[BigRational], z: &CDisk) -> CDisk {
    let mut acc = CDisk::real(BigRational::zero());
    for c in power_coords.iter().rev() {
        acc = acc.mul(z).add(&CDisk::real(c.clone())).round(PREC + 32);
    }
    acc
}

pub fn parse_field(s: &str) -> Result<NumberField> {
    make_field(&QPoly::parse(s)?)
}

impl NumberField {
    pub fn degree(&self) -> usize {
        self.poly.deg()
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn poly_disc(&self) -> &BigInt {
        &self.poly_disc
    }

    /// [O : Z[θ]].
    pub fn index(&self) -> &BigInt {
        &self.index
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.r1, self.r2)
    }

    /// Integral basis as rows of power-basis coordinates.
    pub fn integral_basis(&self) -> &QMat {
        &self.order.basis
    }

    pub(crate) fn order(&self) -> &Order {
        &self.order
    }

    pub fn root_disk(&self, j: usize) -> &CDisk {
        &self.roots[j]
    }

    pub fn all_roots(&self) -> &[CDisk] {
        &self.roots
    }

    fn trace_form_det(&self) -> BigInt {
        let n = self.degree();
        let traces: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut e = vec![BigInt::zero(); n];
                        e[i] = BigInt::one();
                        let mut g = vec![BigInt::zero(); n];
                        g[j] = BigInt::one();
                        let prod = self.order.mul(&e, &g);
                        int_rat(&self.trace(&FieldElement::from_ints(&prod)).to_integer())
                    })
                    .collect()
            })
            .collect();
        q_det(&traces).to_integer()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![BigRational::zero(); self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_int(&self, k: i64) -> FieldElement {
        self.from_rational(rat(k))
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut pc = vec![BigRational::zero(); self.degree()];
        pc[0] = q;
        self.from_power_coords(&pc)
    }

    pub fn from_power_coords(&self, pc: &[BigRational]) -> FieldElement {
        let n = self.degree();
        let mut v = pc.to_vec();
        v.resize(n, BigRational::zero());
        FieldElement { coords: q_vec_mul(&v, &self.order.inv) }
    }

    /// Element given by a polynomial in the generator θ.
    pub fn from_poly(&self, p: &QPoly) -> FieldElement {
        let r = p.rem(&self.poly);
        self.from_power_coords(r.coeffs())
    }

    pub fn theta(&self) -> FieldElement {
        self.from_poly(&QPoly::x())
    }

    pub fn basis_element(&self, k: usize) -> FieldElement {
        let mut c = vec![BigRational::zero(); self.degree()];
        c[k] = BigRational::one();
        FieldElement { coords: c }
    }

    pub fn to_power_coords(&self, a: &FieldElement) -> Vec<BigRational> {
        q_vec_mul(&a.coords, &self.order.basis)
    }

    pub fn to_poly(&self, a: &FieldElement) -> QPoly {
        QPoly::new(self.to_power_coords(a))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect() }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, a: &FieldElement, k: &BigRational) -> FieldElement {
        FieldElement { coords: a.coords.iter().map(|x| x * k).collect() }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.degree();
        let mut out = vec![BigRational::zero(); n];
        for (i, ai) in a.coords.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coords.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let k = ai * bj;
                for (o, t) in out.iter_mut().zip(&self.order.table[i][j]) {
                    if !t.is_zero() {
                        *o += &k * int_rat(t);
                    }
                }
            }
        }
        FieldElement { coords: out }
    }

    /// Integer-coordinate product for elements of O.
    pub fn mul_int(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        self.order.mul(a, b)
    }

    /// Matrix of multiplication by a: row i holds the coordinates of a·ω_i.
    pub fn mul_matrix(&self, a: &FieldElement) -> QMat {
        (0..self.degree()).map(|i| self.mul(a, &self.basis_element(i)).coords).collect()
    }

    pub fn norm(&self, a: &FieldElement) -> BigRational {
        q_det(&self.mul_matrix(a))
    }

    pub fn trace(&self, a: &FieldElement) -> BigRational {
        let m = self.mul_matrix(a);
        (0..self.degree()).map(|i| m[i][i].clone()).sum()
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        let m = q_inverse(&self.mul_matrix(a)).ok_or_else(|| Error::InvalidInput("inverse of zero".into()))?;
        Ok(FieldElement { coords: q_vec_mul(&self.one().coords, &m) })
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut result = self.one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        Ok(result)
    }

    /// Characteristic polynomial over Q (Faddeev–LeVerrier).
    pub fn charpoly(&self, a: &FieldElement) -> QPoly {
        let n = self.degree();
        let m = self.mul_matrix(a);
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut mk: QMat = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        for k in 1..=n {
            let am: QMat = crate::exactalg::linalg::q_mat_mul(&m, &mk);
            let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
            let c = -tr / rat(k as i64);
            coeffs[n - k] = c.clone();
            mk = am;
            for (i, row) in mk.iter_mut().enumerate() {
                row[i] += &c;
            }
        }
        QPoly::new(coeffs)
    }

    /// Minimal polynomial over Q.
    pub fn minpoly(&self, a: &FieldElement) -> QPoly {
        let cp = self.charpoly(a);
        let sf = cp.div_rem(&cp.gcd(&cp.derivative())).0;
        sf.monic()
    }

    /// Enclosure of σ_j(a) for embedding j < r1 + r2.
    pub fn embed(&self, a: &FieldElement, j: usize) -> CDisk {
        let mut acc = CDisk::real(BigRational::zero());
        for (c, w) in a.coords.iter().zip(&self.omega_emb[j]) {
            if !c.is_zero() {
                acc = acc.add(&w.scale(c));
            }
        }
        acc.round(PREC)
    }

    pub fn embed_f64(&self, a: &FieldElement, j: usize) -> (f64, f64) {
        self.embed(a, j).to_f64()
    }

    /// f64 values of σ_j(ω_k).
    pub fn omega_f64(&self) -> Vec<Vec<(f64, f64)>> {
        self.omega_emb.iter().map(|row| row.iter().map(CDisk::to_f64).collect()).collect()
    }

    /// Gram matrix of the T2 form on the integral basis, in f64.
    pub fn t2_gram_f64(&self) -> Vec<Vec<f64>> {
        let n = self.degree();
        let emb = self.omega_f64();
        let mut g = vec![vec![0.0; n]; n];
        for (j, row) in emb.iter().enumerate() {
            let w = if j < self.r1 { 1.0 } else { 2.0 };
            for a in 0..n {
                for b in 0..n {
                    g[a][b] += w * (row[a].0 * row[b].0 + row[a].1 * row[b].1);
                }
            }
        }
        g
    }

    /// Approximate T2 = Σ over all n embeddings of |σ(a)|².
    pub fn t2_f64(&self, a: &FieldElement) -> f64 {
        (0..self.r1 + self.r2)
            .map(|j| {
                let (re, im) = self.embed_f64(a, j);
                let w = if j < self.r1 { 1.0 } else { 2.0 };
                w * (re * re + im * im)
            })
            .sum()
    }

    /// Certified |disc|^(1/n).
    pub fn root_discriminant(&self) -> RatInterval {
        root_interval(&int_rat(&self.disc.abs()), self.degree() as u32, 64)
    }

    /// Minkowski bound (4/π)^{r2} · n!/n^n · √|d|, rounded upward.
    pub fn minkowski_bound(&self) -> f64 {
        let n = self.degree();
        let mut v = (4.0 / std::f64::consts::PI).powi(self.r2 as i32);
        for k in 1..=n {
            v *= k as f64 / n as f64;
        }
        v * rat_to_f64(&int_rat(&self.disc.abs())).sqrt() * (1.0 + 1e-9)
    }

    /// Checks a ∈ K lies in O.
    pub fn is_algebraic_integer(&self, a: &FieldElement) -> bool {
        a.is_integral()
    }

    pub fn is_unit(&self, a: &FieldElement) -> bool {
        a.is_integral() && self.norm(a).abs().is_one()
    }

    /// Roots of a monic integer polynomial g inside this field, found by
    /// matching embedding values and verified exactly. The search tries every
    /// assignment of roots of g to the embeddings of the field, so it is
    /// capped by `max_assignments`.
    pub fn roots_of(&self, g: &QPoly, max_assignments: usize) -> Result<Vec<FieldElement>> {
        let n = self.degree();
        let m = g.deg();
        if m == 0 {
            return Ok(Vec::new());
        }
        let (_, groots) = certified_roots(g)?;
        let gz: Vec<(f64, f64)> = groots.iter().map(CDisk::to_f64).collect();
        let places = self.r1 + self.r2;
        let total = (m as f64).powi(places as i32);
        if total > max_assignments as f64 {
            return Err(Error::Inconclusive(format!("root search over {total} assignments exceeds cap")));
        }
        let emb = self.omega_f64();
        // Real system: for each real place one equation, for complex places two.
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        for (j, row) in emb.iter().enumerate() {
            rows.push(row.iter().map(|z| z.0).collect());
            if j >= self.r1 {
                rows.push(row.iter().map(|z| z.1).collect());
            }
        }
        let lu = FloatLu::new(&rows);
        let mut found: Vec<FieldElement> = Vec::new();
        let mut choice = vec![0usize; places];
        loop {
            let valid = (0..self.r1).all(|j| gz[choice[j]].1.abs() < 1e-9);
            if valid {
                let mut rhs = Vec::with_capacity(n);
                for (j, &c) in choice.iter().enumerate() {
                    rhs.push(gz[c].0);
                    if j >= self.r1 {
                        rhs.push(gz[c].1);
                    }
                }
                if let Some(sol) = lu.as_ref().and_then(|l| l.solve(&rhs)) {
                    if sol.iter().all(|x| (x - x.round()).abs() < 1e-4 && x.abs() < 9e15) {
                        let ints: Vec<BigInt> = sol.iter().map(|x| BigInt::from(x.round() as i64)).collect();
                        let cand = FieldElement::from_ints(&ints);
                        if !found.contains(&cand) && self.eval_poly_at(g, &cand).is_zero() {
                            found.push(cand);
                        }
                    }
                }
            }
            let mut k = 0;
            loop {
                if k == places {
                    found.sort_by_key(|e| (e.height(), format!("{e:?}")));
                    return Ok(found);
                }
                choice[k] += 1;
                if choice[k] < m {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    /// g(a) for a rational polynomial g.
    pub fn eval_poly_at(&self, g: &QPoly, a: &FieldElement) -> FieldElement {
        let mut acc = self.zero();
        for c in g.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, a), &self.from_rational(c.clone()));
        }
        acc
    }

    /// Certified square root when a is a square in O; `None` when some
    /// degree-one prime proves a is not a square; an error otherwise.
    pub fn sqrt(&self, a: &FieldElement) -> Result<Option<FieldElement>> {
        if a.is_zero() {
            return Ok(Some(self.zero()));
        }
        if let Some(r) = self.try_sqrt_numeric(a) {
            return Ok(Some(r));
        }
        if self.nonsquare_witness(a).is_some() {
            return Ok(None);
        }
        Err(Error::Inconclusive(format!("could not decide whether {a:?} is a square")))
    }

    fn try_sqrt_numeric(&self, a: &FieldElement) -> Option<FieldElement> {
        let n = self.degree();
        let places = self.r1 + self.r2;
        let emb = self.omega_f64();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        for (j, row) in emb.iter().enumerate() {
            rows.push(row.iter().map(|z| z.0).collect());
            if j >= self.r1 {
                rows.push(row.iter().map(|z| z.1).collect());
            }
        }
        let lu = FloatLu::new(&rows)?;
        // scale a by a square denominator so the root is integral
        let den = a.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let a_int = self.scale(a, &int_rat(&(&den * &den)));
        let vals: Vec<(f64, f64)> = (0..places).map(|j| self.embed_f64(&a_int, j)).collect();
        let roots: Vec<(f64, f64)> = vals
            .iter()
            .map(|&(re, im)| {
                let r = re.hypot(im).sqrt();
                let t = im.atan2(re) / 2.0;
                (r * t.cos(), r * t.sin())
            })
            .collect();
        for (j, &(re, im)) in vals.iter().enumerate() {
            if j < self.r1 && (re < 0.0 || im.abs() > 1e-9) {
                return None;
            }
        }
        for mask in 0u32..(1 << places) {
            if mask & 1 == 1 {
                continue; // ±r give the same answer up to sign
            }
            let mut rhs = Vec::with_capacity(n);
            for (j, &(re, im)) in roots.iter().enumerate() {
                let s = if mask >> j & 1 == 1 { -1.0 } else { 1.0 };
                rhs.push(s * re);
                if j >= self.r1 {
                    rhs.push(s * im);
                }
            }
            let sol = lu.solve(&rhs)?;
            if sol.iter().all(|x| (x - x.round()).abs() < 1e-4 && x.abs() < 9e15) {
                let ints: Vec<BigInt> = sol.iter().map(|x| BigInt::from(x.round() as i64)).collect();
                let r = FieldElement::from_ints(&ints);
                if self.mul(&r, &r) == a_int {
                    return Some(self.scale(&r, &BigRational::new(BigInt::one(), den)));
                }
            }
        }
        None
    }

    /// A prime q and a root t of f mod q (a degree-one prime) at which a is a
    /// nonzero non-square, which proves a is not a square in K.
    pub fn nonsquare_witness(&self, a: &FieldElement) -> Option<(u64, u64)> {
        for q in crate::exactalg::intfactor::primes_up_to(2000).into_iter().skip(1) {
            for t in self.degree_one_roots(q) {
                if let Some(v) = self.reduce_at(a, q, t) {
                    if v != 0 && crate::exactalg::fp::powmod(v, (q - 1) / 2, q) == q - 1 {
                        return Some((q, t));
                    }
                }
            }
        }
        None
    }

    /// Roots t of f mod q when q is coprime to the index and the discriminant,
    /// each defining a degree-one prime (q, θ - t).
    pub fn degree_one_roots(&self, q: u64) -> Vec<u64> {
        let qb = BigInt::from(q);
        if (&self.poly_disc % &qb).is_zero() {
            return Vec::new();
        }
        let fq = crate::exactalg::fp::FpPoly::from_qpoly(q, &self.poly).expect("integral polynomial");
        if q <= 5000 {
            return (0..q).filter(|&t| fq.eval(t) == 0).collect();
        }
        let mut roots: Vec<u64> = crate::exactalg::fp::factor_mod_p(&fq)
            .map(|fs| fs.into_iter().filter(|(g, _)| g.deg() == 1).map(|(g, _)| (q - g.coeff(0)) % q).collect())
            .unwrap_or_default();
        roots.sort_unstable();
        roots
    }

    /// Image of a in O/(q, θ - t) ≅ F_q, or `None` if a is not q-integral.
    pub fn reduce_at(&self, a: &FieldElement, q: u64, t: u64) -> Option<u64> {
        let pc = self.to_power_coords(a);
        let mut acc = 0u64;
        for c in pc.iter().rev() {
            if (c.denom() % BigInt::from(q)).is_zero() {
                return None;
            }
            let v = mulmod(reduce_big(c.numer(), q), crate::exactalg::fp::invmod(reduce_big(c.denom(), q), q), q);
            acc = (mulmod(acc, t, q) + v) % q;
        }
        Some(acc)
    }
}

/// LU decomposition with partial pivoting for the small real systems above.
struct FloatLu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl FloatLu {
    fn new(a: &[Vec<f64>]) -> Option<Self> {
        let n = a.len();
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for c in 0..n {
            let piv = (c..n).max_by(|&i, &j| lu[i][c].abs().partial_cmp(&lu[j][c].abs()).expect("finite"))?;
            if lu[piv][c].abs() < 1e-300 {
                return None;
            }
            lu.swap(c, piv);
            perm.swap(c, piv);
            for r in c + 1..n {
                let k = lu[r][c] / lu[c][c];
                lu[r][c] = k;
                for j in c + 1..n {
                    lu[r][j] -= k * lu[c][j];
                }
            }
        }
        Some(FloatLu { lu, perm })
    }

    /// Solves A·x = b, rows of A being equations in the unknown coordinates.
    fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.lu.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[i][j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[i][j] * y[j];
            }
            y[i] /= self.lu[i][i];
        }
        y.iter().all(|v| v.is_finite()).then_some(y)
    }
}
