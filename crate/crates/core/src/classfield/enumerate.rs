//! Fincke–Pohst enumeration of small elements of an ideal under the T2 form.
//!
//! The quadratic form is evaluated in f64 with a relative slack; the slack
//! only ever enlarges the search region, so no element inside the requested
//! bound is missed.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactalg::lll::{gram_schmidt, lll_gram};
use crate::numfield::{FieldElement, Ideal, NumberField};

const SLACK: f64 = 1e-7;

/// LLL-reduced Z-basis of the ideal (rows, integral-basis coordinates).
pub fn reduced_basis(k: &NumberField, ideal: &Ideal) -> Vec<Vec<BigInt>> {
    let n = k.degree();
    let rows = ideal.basis().to_rows();
    let g = ideal_gram(k, &rows);
    let u = lll_gram(&g, 0.99);
    u.iter()
        .map(|ur| {
            let mut v = vec![BigInt::from(0); n];
            for (c, row) in ur.iter().zip(&rows) {
                if *c != 0 {
                    for (o, x) in v.iter_mut().zip(row) {
                        *o += x * BigInt::from(*c);
                    }
                }
            }
            v
        })
        .collect()
}

fn ideal_gram(k: &NumberField, rows: &[Vec<BigInt>]) -> Vec<Vec<f64>> {
    let g0 = k.t2_gram_f64();
    let n = k.degree();
    let rf: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(big_f64).collect()).collect();
    let mut out = vec![vec![0.0; rows.len()]; rows.len()];
    for a in 0..rows.len() {
        for b in 0..rows.len() {
            let mut s = 0.0;
            for i in 0..n {
                if rf[a][i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += rf[a][i] * g0[i][j] * rf[b][j];
                }
            }
            out[a][b] = s;
        }
    }
    out
}

fn big_f64(x: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY)
}

/// Nonzero elements x of the ideal with T2(x) ≤ bound, one of each ±x pair,
/// sorted by T2 then coordinates. Errors once more than `cap` are found.
pub fn short_elements(k: &NumberField, ideal: &Ideal, bound: f64, cap: usize) -> Result<Vec<FieldElement>> {
    let basis = reduced_basis(k, ideal);
    let g = ideal_gram(k, &basis);
    let n = basis.len();
    let (mu, b) = gram_schmidt(&g);
    if b.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::Precision("degenerate Gram matrix in enumeration".into()));
    }
    let limit = bound * (1.0 + SLACK) + SLACK;
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut x = vec![0i64; n];
    enumerate(n, &mu, &b, limit, n, 0.0, &mut x, &mut found, cap)?;
    let mut out: Vec<(f64, Vec<BigInt>)> = found
        .into_iter()
        .filter(|v| v.iter().rev().find(|&&c| c != 0).is_some_and(|&c| c > 0))
        .map(|v| {
            let mut e = vec![BigInt::from(0); k.degree()];
            for (c, row) in v.iter().zip(&basis) {
                if *c != 0 {
                    for (o, y) in e.iter_mut().zip(row) {
                        *o += y * BigInt::from(*c);
                    }
                }
            }
            (k.t2_f64(&FieldElement::from_ints(&e)), e)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out.into_iter().map(|(_, e)| FieldElement::from_ints(&e)).collect())
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    n: usize,
    mu: &[Vec<f64>],
    b: &[f64],
    limit: f64,
    level: usize,
    partial: f64,
    x: &mut Vec<i64>,
    found: &mut Vec<Vec<i64>>,
    cap: usize,
) -> Result<()> {
    if level == 0 {
        if x.iter().any(|&c| c != 0) {
            found.push(x.clone());
            if found.len() > 2 * cap {
                return Err(Error::Inconclusive(format!("enumeration exceeded {cap} candidates")));
            }
        }
        return Ok(());
    }
    let i = level - 1;
    let center: f64 = -(i + 1..n).map(|j| mu[j][i] * x[j] as f64).sum::<f64>();
    let rem = limit - partial;
    if rem < 0.0 {
        return Ok(());
    }
    let r = (rem / b[i]).sqrt() * (1.0 + SLACK);
    let lo = (center - r).ceil() as i64;
    let hi = (center + r).floor() as i64;
    for xi in lo..=hi {
        let d = xi as f64 - center;
        let p = partial + b[i] * d * d;
        if p > limit {
            continue;
        }
        x[i] = xi;
        enumerate(n, mu, b, limit, i, p, x, found, cap)?;
    }
    x[i] = 0;
    Ok(())
}
