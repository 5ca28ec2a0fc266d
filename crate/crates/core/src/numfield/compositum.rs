//! Composita, square-root adjunction and polynomial reduction. Every field
//! produced here comes with exact embeddings of its inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::lll::lll_gram;
use crate::exactalg::poly::{int_rat, rat, QPoly};

use super::field::{make_field, FieldElement, NumberField, MAX_DEGREE};
use super::roots::factor_over_q;

/// Primitive element search range for a + k·b.
const MULTIPLIERS: std::ops::RangeInclusive<i64> = 1..=20;
const ROOT_SEARCH_CAP: usize = 1 << 20;

/// A field homomorphism, stored as the image of the source generator θ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub theta_image: FieldElement,
}

impl Embedding {
    pub fn identity(k: &NumberField) -> Self {
        Embedding { theta_image: k.theta() }
    }

    pub fn apply(&self, src: &NumberField, dst: &NumberField, a: &FieldElement) -> FieldElement {
        dst.eval_poly_at(&src.to_poly(a), &self.theta_image)
    }

    /// self followed by `next`.
    pub fn then(&self, mid: &NumberField, dst: &NumberField, next: &Embedding) -> Embedding {
        Embedding { theta_image: next.apply(mid, dst, &self.theta_image) }
    }
}

/// Interpolates the monic polynomial of degree `deg` whose values at
/// x = 0, 1, …, deg are given by `eval`.
fn interpolate_monic(deg: usize, eval: impl Fn(&BigRational) -> BigRational) -> QPoly {
    let xs: Vec<BigRational> = (0..=deg as i64).map(rat).collect();
    let ys: Vec<BigRational> = xs.iter().map(&eval).collect();
    // Newton divided differences
    let mut dd = ys.clone();
    for j in 1..=deg {
        for i in (j..=deg).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = QPoly::constant(dd[deg].clone());
    for i in (0..deg).rev() {
        p = p.mul(&QPoly::new(vec![-xs[i].clone(), BigRational::one()])).add(&QPoly::constant(dd[i].clone()));
    }
    if p.is_zero() {
        p
    } else {
        p.monic()
    }
}

/// Res_y(f1(y), f2(x − k·y)): its roots are α + k·β.
fn sum_resultant(f1: &QPoly, f2: &QPoly, k: i64) -> QPoly {
    let ky = QPoly::from_ints(&[0, -k]);
    interpolate_monic(f1.deg() * f2.deg(), |x0| {
        let lin = ky.add(&QPoly::constant(x0.clone()));
        f1.resultant(&f2.compose(&lin))
    })
}

/// Res_y(f(y), (x − k·y)² − u(y)): its roots are ±√σ(u) + k·σ(θ).
fn sqrt_resultant(f: &QPoly, u: &QPoly, k: i64) -> QPoly {
    interpolate_monic(2 * f.deg(), |x0| {
        let lin = QPoly::new(vec![x0.clone(), rat(-k)]);
        f.resultant(&lin.mul(&lin).sub(u))
    })
}

/// Clears denominators of the roots: returns the monic integer polynomial of
/// c·γ for the smallest positive integer c making it integral.
fn integralize(g: &QPoly) -> (QPoly, BigInt) {
    let n = g.deg();
    let mut c = BigInt::one();
    loop {
        // poly of cγ: c^n g(x/c)
        let cr = int_rat(&c);
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut pw = BigRational::one();
        for i in (0..=n).rev() {
            coeffs.push(g.coeff(i) * &pw);
            pw *= &cr;
        }
        coeffs.reverse();
        let h = QPoly::new(coeffs);
        if h.is_integral() {
            return (h, c);
        }
        c += 1;
    }
}

/// A field containing both inputs, with embeddings of each.
pub fn compositum(f1: &NumberField, f2: &NumberField) -> Result<(NumberField, Embedding, Embedding)> {
    let n = f1.degree() * f2.degree();
    if n > MAX_DEGREE * MAX_DEGREE || f1.degree().max(f2.degree()) > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    for k in MULTIPLIERS {
        let h = sum_resultant(f1.poly(), f2.poly(), k);
        if !h.is_squarefree() {
            continue;
        }
        let factors = factor_over_q(&h)?;
        let g = factors
            .iter()
            .min_by_key(|g| (g.deg(), format!("{g}")))
            .expect("nonconstant resultant has a factor")
            .clone();
        if g.deg() > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(g.deg()));
        }
        let l = make_field(&g)?;
        let gamma = l.theta();
        let kr = rat(k);
        for r in l.roots_of(f1.poly(), ROOT_SEARCH_CAP)? {
            let other = l.scale(&l.sub(&gamma, &r), &(BigRational::one() / &kr));
            if l.eval_poly_at(f2.poly(), &other).is_zero() {
                let e1 = Embedding { theta_image: r };
                let e2 = Embedding { theta_image: other };
                return polred_with(l, &[e1, e2]).map(|(l, mut es)| {
                    let e2 = es.pop().expect("two embeddings");
                    let e1 = es.pop().expect("two embeddings");
                    (l, e1, e2)
                });
            }
        }
        return Err(Error::InvalidInput("compositum generator does not decompose".into()));
    }
    Err(Error::Inconclusive("no squarefree primitive element among small multipliers".into()))
}

/// Result of adjoining √u to F.
#[derive(Clone, Debug)]
pub struct SqrtExtension {
    pub field: NumberField,
    pub embedding: Embedding,
    pub sqrt: FieldElement,
}

/// F(√u) with the embedding of F and the image of √u; `None` when u is
/// already a square in F.
pub fn adjoin_sqrt(f: &NumberField, u: &FieldElement) -> Result<Option<SqrtExtension>> {
    if u.is_zero() {
        return Err(Error::InvalidInput("cannot adjoin the square root of zero".into()));
    }
    if 2 * f.degree() > MAX_DEGREE {
        if f.sqrt(u)?.is_some() {
            return Ok(None);
        }
        return Err(Error::DegreeTooLarge(2 * f.degree()));
    }
    let up = f.to_poly(u);
    for k in MULTIPLIERS {
        let r = sqrt_resultant(f.poly(), &up, k);
        if !r.is_squarefree() {
            continue;
        }
        let (g, c) = integralize(&r);
        let factors = factor_over_q(&g)?;
        if factors.len() > 1 {
            return match f.sqrt(u)? {
                Some(_) => Ok(None),
                None => Err(Error::InvalidInput("square-root resultant splits for a non-square".into())),
            };
        }
        let l = make_field(&g)?;
        // θ_L = c·(√u + kθ_F)
        let gamma = l.scale(&l.theta(), &(BigRational::one() / int_rat(&c)));
        for root in l.roots_of(f.poly(), ROOT_SEARCH_CAP)? {
            let s = l.sub(&gamma, &l.scale(&root, &rat(k)));
            let image_u = l.eval_poly_at(&up, &root);
            if l.mul(&s, &s) == image_u {
                let emb = Embedding { theta_image: root };
                let sq = Embedding { theta_image: s };
                let (l2, mut es) = polred_with(l, &[emb, sq])?;
                let sq = es.pop().expect("two maps");
                let emb = es.pop().expect("two maps");
                return Ok(Some(SqrtExtension { field: l2, embedding: emb, sqrt: sq.theta_image }));
            }
        }
        return Err(Error::InvalidInput("square-root generator does not decompose".into()));
    }
    Err(Error::Inconclusive("no squarefree primitive element among small multipliers".into()))
}

/// A defining polynomial with small coefficients, found from short vectors of
/// the T2 lattice; returns the new field and the image of the old generator.
pub fn polred(k: &NumberField) -> Result<(NumberField, Embedding)> {
    let (l, mut es) = polred_with(k.clone(), &[Embedding::identity(k)])?;
    Ok((l, es.pop().expect("one map")))
}

/// Polred and push the given maps (stored as elements of `k`) into the new field.
fn polred_with(k: NumberField, maps: &[Embedding]) -> Result<(NumberField, Vec<Embedding>)> {
    let n = k.degree();
    if n == 1 {
        return Ok((k, maps.to_vec()));
    }
    let u = lll_gram(&k.t2_gram_f64(), 0.99);
    let short: Vec<FieldElement> =
        u.iter().map(|row| FieldElement::from_ints(&row.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())).collect();
    let mut cands = short.clone();
    for i in 0..n {
        for j in i + 1..n {
            cands.push(k.add(&short[i], &short[j]));
            cands.push(k.sub(&short[i], &short[j]));
        }
    }
    let mut best: Option<(BigInt, String, QPoly, FieldElement)> = None;
    for c in cands {
        for c in [c.clone(), k.neg(&c)] {
            let cp = k.charpoly(&c);
            if !cp.is_squarefree() {
                continue;
            }
            let size: BigInt = cp.coeffs().iter().map(|x| x.to_integer().abs()).sum();
            let key = (size, format!("{cp}"));
            if best.as_ref().map_or(true, |b| (&key.0, &key.1) < (&b.0, &b.1)) {
                best = Some((key.0, key.1, cp, c));
            }
        }
    }
    let Some((_, _, poly, gen)) = best else {
        return Ok((k, maps.to_vec()));
    };
    let size = |p: &QPoly| -> BigInt { p.coeffs().iter().map(|x| x.to_integer().abs()).sum() };
    if size(&poly) >= size(k.poly()) {
        return Ok((k, maps.to_vec()));
    }
    let l = make_field(&poly)?;
    let gen_poly = k.to_poly(&gen);
    for r in l.roots_of(k.poly(), ROOT_SEARCH_CAP)? {
        if l.eval_poly_at(&gen_poly, &r) == l.theta() {
            let phi = Embedding { theta_image: r };
            let pushed = maps.iter().map(|m| Embedding { theta_image: phi.apply(&k, &l, &m.theta_image) }).collect();
            return Ok((l, pushed));
        }
    }
    Err(Error::InvalidInput("reduced polynomial does not define an isomorphic field".into()))
}

/// Whether two fields are isomorphic (one defining polynomial has a root in the other).
pub fn isomorphic(a: &NumberField, b: &NumberField) -> Result<bool> {
    if a.degree() != b.degree() || a.disc() != b.disc() {
        return Ok(false);
    }
    Ok(!b.roots_of(a.poly(), ROOT_SEARCH_CAP)?.is_empty())
}

/// Whether integer coordinates of x are all zero; helper for callers testing
/// membership of embedded elements.
pub fn is_zero_elem(x: &FieldElement) -> bool {
    x.coords.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::field::parse_field;

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = QPoly::from_ints(&[5, -3, 0, 1]);
        let g = interpolate_monic(3, |x| f.eval(x));
        assert_eq!(g, f);
    }

    #[test]
    fn gaussian_and_sqrt13() {
        let a = parse_field("x^2+1").unwrap();
        let b = parse_field("x^2-13").unwrap();
        let (l, e1, e2) = compositum(&a, &b).unwrap();
        assert_eq!(l.degree(), 4);
        let i = e1.apply(&a, &l, &a.theta());
        assert_eq!(l.mul(&i, &i), l.from_int(-1));
        let s = e2.apply(&b, &l, &b.theta());
        assert_eq!(l.mul(&s, &s), l.from_int(13));
    }

    #[test]
    fn idempotent() {
        let b = parse_field("x^2-13").unwrap();
        let (l, _, _) = compositum(&b, &b).unwrap();
        assert_eq!(l.degree(), 2);
        assert_eq!(l.disc(), b.disc());
    }

    #[test]
    fn adjoin_square_root_of_unit() {
        let k = parse_field("x^2-13").unwrap();
        let eta = k.sqrt(&k.from_int(13)).unwrap().unwrap();
        let eta = k.scale(&k.add(&k.from_int(3), &eta), &(rat(1) / rat(2)));
        assert_eq!(k.norm(&eta).abs(), rat(1));
        let ext = adjoin_sqrt(&k, &eta).unwrap().unwrap();
        assert_eq!(ext.field.degree(), 4);
        let img = ext.embedding.apply(&k, &ext.field, &eta);
        assert_eq!(ext.field.mul(&ext.sqrt, &ext.sqrt), img);
        assert!(adjoin_sqrt(&k, &k.from_int(13)).unwrap().is_none());
        assert!(adjoin_sqrt(&k, &k.from_int(9)).unwrap().is_none());
    }

    #[test]
    fn polred_keeps_field() {
        let k = parse_field("x^2 - 2*x - 12").unwrap();
        let (l, phi) = polred(&k).unwrap();
        assert_eq!(l.disc(), k.disc());
        let img = phi.theta_image;
        assert!(l.eval_poly_at(k.poly(), &img).is_zero());
    }

    #[test]
    fn torsion_tower_over_sqrt13() {
        let k = parse_field("x^2-x-3").unwrap();
        let eta = k.add(&k.from_int(1), &k.theta());
        assert_eq!(k.norm(&eta), rat(-1));
        let ki = adjoin_sqrt(&k, &k.from_int(-1)).unwrap().unwrap();
        let eta_i = ki.embedding.apply(&k, &ki.field, &eta);
        let top = adjoin_sqrt(&ki.field, &eta_i).unwrap().unwrap();
        assert_eq!(top.field.degree(), 8);
        assert_eq!(top.field.disc(), &BigInt::from(116985856));
    }
}
