//! Certified complex roots of squarefree rational polynomials, Sturm counts,
//! and factorization over Q by root-subset search.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::interval::{ceil_dyadic, floor_dyadic, nth_root_ceil, CDisk, PREC};
use crate::exactalg::poly::{rat, rat_to_f64, QPoly};

#[derive(Clone, Copy, Debug, PartialEq)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
    fn mul(self, o: C64) -> C64 {
        C64 { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64 { re: (self.re * o.re + self.im * o.im) / d, im: (self.im * o.re - self.re * o.im) / d }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Aberth–Ehrlich iteration in double precision (starting guesses only).
fn approx_roots(f: &QPoly) -> Vec<C64> {
    let n = f.deg();
    let lead = rat_to_f64(&f.lead());
    let c: Vec<f64> = f.coeffs().iter().map(|x| rat_to_f64(x) / lead).collect();
    let eval = |z: C64| -> (C64, C64) {
        let mut p = C64 { re: 0.0, im: 0.0 };
        let mut dp = C64 { re: 0.0, im: 0.0 };
        for &a in c.iter().rev() {
            dp = dp.mul(z).add(p);
            p = p.mul(z).add(C64 { re: a, im: 0.0 });
        }
        (p, dp)
    };
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            C64 { re: 0.5 * radius * t.cos(), im: 0.5 * radius * t.sin() }
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.abs() == 0.0 {
                continue;
            }
            let ratio = p.div(dp);
            let mut s = C64 { re: 0.0, im: 0.0 };
            for j in 0..n {
                if j != i {
                    s = s.add(C64 { re: 1.0, im: 0.0 }.div(z[i].sub(z[j])));
                }
            }
            let w = ratio.div(C64 { re: 1.0, im: 0.0 }.sub(ratio.mul(s)));
            z[i] = z[i].sub(w);
            moved = moved.max(w.abs() / (1.0 + z[i].abs()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Number of real roots of a squarefree polynomial via a Sturm sequence.
pub fn count_real_roots(f: &QPoly) -> usize {
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let k = seq.len();
        let r = seq[k - 2].rem(&seq[k - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.neg());
    }
    let changes = |signs: Vec<i32>| -> usize {
        let s: Vec<i32> = signs.into_iter().filter(|&x| x != 0).collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let sign = |x: &BigRational| if x.is_positive() { 1 } else if x.is_negative() { -1 } else { 0 };
    let at_pos: Vec<i32> = seq.iter().map(|p| sign(&p.lead())).collect();
    let at_neg: Vec<i32> = seq
        .iter()
        .map(|p| sign(&p.lead()) * if p.deg() % 2 == 1 { -1 } else { 1 })
        .collect();
    changes(at_neg) - changes(at_pos)
}

fn eval_complex(f: &QPoly, re: &BigRational, im: &BigRational) -> (BigRational, BigRational) {
    let mut pr = BigRational::zero();
    let mut pi = BigRational::zero();
    for c in f.coeffs().iter().rev() {
        let nr = &pr * re - &pi * im + c;
        let ni = &pr * im + &pi * re;
        pr = nr;
        pi = ni;
    }
    (pr, pi)
}

fn newton_step(f: &QPoly, df: &QPoly, re: &BigRational, im: &BigRational, bits: u64) -> (BigRational, BigRational) {
    let (fr, fi) = eval_complex(f, re, im);
    let (dr, di) = eval_complex(df, re, im);
    let d2 = &dr * &dr + &di * &di;
    if d2.is_zero() {
        return (re.clone(), im.clone());
    }
    let qr = (&fr * &dr + &fi * &di) / &d2;
    let qi = (&fi * &dr - &fr * &di) / &d2;
    (floor_dyadic(&(re - qr), bits), floor_dyadic(&(im - qi), bits))
}

/// Certified enclosures of all roots of a squarefree polynomial.
///
/// Returns `(r1, disks)` where the first `r1` disks have real centers and
/// enclose the real roots in increasing order; the remaining ones come in
/// conjugate pairs with the positive-imaginary member first. Each disk of
/// radius `n·|f(z)|/|f'(z)|` contains a root, and the disks are pairwise
/// disjoint, so each contains exactly one.
pub fn certified_roots(f: &QPoly) -> Result<(usize, Vec<CDisk>)> {
    let n = f.deg();
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    if !f.is_squarefree() {
        return Err(Error::InvalidInput(format!("{f} is not squarefree")));
    }
    let r1 = count_real_roots(f);
    let df = f.derivative();
    let mut approx = approx_roots(f);
    approx.sort_by(|a, b| a.im.abs().partial_cmp(&b.im.abs()).expect("finite roots"));
    let mut reals: Vec<f64> = approx[..r1].iter().map(|z| z.re).collect();
    reals.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut cplx: Vec<C64> = approx[r1..].iter().filter(|z| z.im > 0.0).copied().collect();
    cplx.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite"));
    if cplx.len() * 2 + r1 != n {
        return Err(Error::Precision(format!("root isolation failed for {f}")));
    }
    let to_rat = |x: f64| -> BigRational {
        BigRational::from_float(x).map(|r| floor_dyadic(&r, 60)).unwrap_or_else(BigRational::zero)
    };
    for bits in [PREC, 2 * PREC, 4 * PREC] {
        let mut centers: Vec<(BigRational, BigRational)> = Vec::with_capacity(r1 + cplx.len());
        for &x in &reals {
            let mut z = (to_rat(x), BigRational::zero());
            let mut b = 64;
            while b < 2 * bits {
                b *= 2;
                z = newton_step(f, &df, &z.0, &z.1, b.min(bits + 32));
                z.1 = BigRational::zero();
            }
            for _ in 0..2 {
                z = newton_step(f, &df, &z.0, &z.1, bits + 32);
                z.1 = BigRational::zero();
            }
            centers.push(z);
        }
        for c in &cplx {
            let mut z = (to_rat(c.re), to_rat(c.im));
            let mut b = 64;
            while b < 2 * bits {
                b *= 2;
                z = newton_step(f, &df, &z.0, &z.1, b.min(bits + 32));
            }
            for _ in 0..2 {
                z = newton_step(f, &df, &z.0, &z.1, bits + 32);
            }
            centers.push(z);
        }
        let mut disks = Vec::with_capacity(n);
        let mut ok = true;
        for (re, im) in &centers {
            let (fr, fi) = eval_complex(f, re, im);
            let (dr, di) = eval_complex(&df, re, im);
            let d2 = &dr * &dr + &di * &di;
            if d2.is_zero() {
                ok = false;
                break;
            }
            let r2 = (&fr * &fr + &fi * &fi) * rat((n * n) as i64) / d2;
            let rad = ceil_dyadic(&nth_root_ceil(&r2, 2, bits), bits);
            let rad = if rad.is_zero() { BigRational::new(BigInt::from(1), BigInt::from(1) << bits) } else { rad };
            disks.push(CDisk { re: re.clone(), im: im.clone(), rad });
        }
        if !ok {
            continue;
        }
        // complex roots: disk must avoid the real axis so the conjugate disk is distinct
        for d in &disks[r1..] {
            if d.im <= d.rad {
                ok = false;
            }
        }
        let mut all: Vec<CDisk> = disks.clone();
        for d in &disks[r1..] {
            all.push(CDisk { re: d.re.clone(), im: -d.im.clone(), rad: d.rad.clone() });
        }
        'pairs: for i in 0..all.len() {
            for j in i + 1..all.len() {
                let dx = &all[i].re - &all[j].re;
                let dy = &all[i].im - &all[j].im;
                let sr = &all[i].rad + &all[j].rad;
                if &dx * &dx + &dy * &dy <= &sr * &sr {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            let mut out = disks[..r1].to_vec();
            for d in &disks[r1..] {
                out.push(d.clone());
            }
            for d in &disks[r1..] {
                out.push(CDisk { re: d.re.clone(), im: -d.im.clone(), rad: d.rad.clone() });
            }
            return Ok((r1, out));
        }
    }
    Err(Error::Precision(format!("could not certify roots of {f}")))
}

/// Product of (x - z) over a subset of disks, as coefficient disks.
fn subset_product(disks: &[&CDisk], bits: u64) -> Vec<CDisk> {
    let mut coeffs = vec![CDisk::real(rat(1))];
    for z in disks {
        let mut next = vec![CDisk::real(BigRational::zero()); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            let t = c.mul(z);
            next[i] = next[i].sub(&t);
        }
        coeffs = next.into_iter().map(|c| c.round(bits)).collect();
    }
    coeffs
}

fn nearest_integer(d: &CDisk) -> Option<BigInt> {
    if d.im.abs() > d.rad {
        return None;
    }
    let m = (&d.re + BigRational::new(1.into(), 2.into())).floor().to_integer();
    let dist = (&d.re - BigRational::from_integer(m.clone())).abs();
    (dist <= d.rad || dist.is_zero()).then_some(m)
}

/// Monic irreducible factor of a monic integer squarefree `f` that vanishes on
/// the root enclosed by `roots[target]`.
pub fn irreducible_factor_containing(f: &QPoly, roots: &[CDisk], target: usize) -> Result<QPoly> {
    let n = roots.len();
    let others: Vec<usize> = (0..n).filter(|&i| i != target).collect();
    for size in 1..n {
        let mut idx: Vec<usize> = (0..size - 1).collect();
        loop {
            let mut chosen: Vec<&CDisk> = vec![&roots[target]];
            chosen.extend(idx.iter().map(|&i| &roots[others[i]]));
            let prod = subset_product(&chosen, PREC);
            let ints: Option<Vec<BigInt>> = prod.iter().map(nearest_integer).collect();
            if let Some(ints) = ints {
                let g = QPoly::from_bigints(&ints);
                if f.rem(&g).is_zero() {
                    return Ok(g);
                }
            }
            if !next_combination(&mut idx, others.len()) {
                break;
            }
        }
    }
    Ok(f.clone())
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Complete factorization of a monic integer squarefree polynomial over Q.
pub fn factor_over_q(f: &QPoly) -> Result<Vec<QPoly>> {
    if f.deg() <= 1 {
        return Ok(vec![f.clone()]);
    }
    let mut rest = f.clone();
    let mut out = Vec::new();
    while rest.deg() > 0 {
        let (_, roots) = certified_roots(&rest)?;
        let g = irreducible_factor_containing(&rest, &roots, 0)?;
        rest = rest.div_rem(&g).0;
        out.push(g);
    }
    out.sort_by(|a, b| (a.deg(), a.to_string()).cmp(&(b.deg(), b.to_string())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_counts() {
        assert_eq!(count_real_roots(&QPoly::parse("x^2-13").unwrap()), 2);
        assert_eq!(count_real_roots(&QPoly::parse("x^2+1").unwrap()), 0);
        assert_eq!(count_real_roots(&QPoly::parse("x^3-x-1").unwrap()), 1);
        assert_eq!(count_real_roots(&QPoly::parse("x^4-3x^2-1").unwrap()), 2);
    }

    #[test]
    fn roots_are_certified() {
        let f = QPoly::parse("x^8 - 4x^7 + 8x^6 - 6x^5 + 7x^4 - 10x^3 + 2x^2 - 6x + 9").unwrap();
        let (r1, roots) = certified_roots(&f).unwrap();
        assert_eq!(r1, 0);
        assert_eq!(roots.len(), 8);
        for d in &roots {
            assert!(rat_to_f64(&d.rad) < 1e-30);
        }
        let (r1, roots) = certified_roots(&QPoly::parse("x^2-13").unwrap()).unwrap();
        assert_eq!(r1, 2);
        assert!(rat_to_f64(&roots[0].re) < 0.0);
    }

    #[test]
    fn factors_over_q() {
        let f = QPoly::parse("x^4 - 24*x^2 + 196").unwrap();
        assert_eq!(factor_over_q(&f).unwrap(), vec![f.clone()]);
        let g = QPoly::parse("x^4-1").unwrap();
        let fs = factor_over_q(&g).unwrap();
        assert_eq!(fs.len(), 3);
        let h = QPoly::parse("x^4+4").unwrap(); // (x^2+2x+2)(x^2-2x+2)
        assert_eq!(factor_over_q(&h).unwrap().len(), 2);
    }
}
