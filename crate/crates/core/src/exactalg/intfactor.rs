//! Integer factorization: trial division, Miller–Rabin, Pollard–Brent.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin with the first twelve prime bases; deterministic below 3.3e24,
/// probabilistic beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for &w in &WITNESSES {
        let w = BigInt::from(w);
        if *n == w {
            return true;
        }
        if (n % &w).is_zero() {
            return false;
        }
    }
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &w in &WITNESSES {
        let mut x = BigInt::from(w).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    is_probable_prime(&BigInt::from(n))
}

fn pollard_brent(n: &BigInt, c: u64) -> Option<BigInt> {
    let c = BigInt::from(c);
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = BigInt::from(2);
    let mut r: u64 = 1;
    let mut q = BigInt::one();
    let m = 64;
    let mut g = BigInt::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > 1 << 24 {
            return None;
        }
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}

fn split_into(n: BigInt, out: &mut BTreeMap<BigInt, u32>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    for c in 1u64.. {
        if let Some(d) = pollard_brent(&n, c) {
            let e = &n / &d;
            split_into(d, out);
            split_into(e, out);
            return;
        }
        assert!(c < 64, "Pollard–Brent failed to split {n}");
    }
}

/// Prime factorization of |n| (n ≠ 0) as an ordered map prime → exponent.
pub fn factorize(n: &BigInt) -> BTreeMap<BigInt, u32> {
    assert!(!n.is_zero(), "factorize(0)");
    let mut m = n.abs();
    let mut out = BTreeMap::new();
    let mut p = 2u64;
    while p < 10_000 {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        while (&m % &pb).is_zero() {
            m /= &pb;
            *out.entry(pb.clone()).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_into(m, &mut out);
    out
}

pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    factorize(&BigInt::from(n))
        .into_iter()
        .map(|(p, e)| (p.to_u64().expect("factor of u64"), e))
        .collect()
}

/// Squarefree test by factorization.
pub fn is_squarefree(n: &BigInt) -> bool {
    !n.is_zero() && factorize(n).values().all(|&e| e == 1)
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime_u64(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorizations() {
        assert_eq!(factorize_u64(116985856), vec![(2, 12), (13, 4)]);
        assert_eq!(factorize_u64(1), vec![]);
        assert_eq!(factorize_u64(97), vec![(97, 1)]);
    }

    #[test]
    fn big_semiprime() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(998_244_353u64);
        let f = factorize(&(&p * &q * &q));
        assert_eq!(f.get(&p), Some(&1));
        assert_eq!(f.get(&q), Some(&2));
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2) && is_prime_u64(13) && !is_prime_u64(1) && !is_prime_u64(561));
        let brute: Vec<u64> = (2..200).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
        assert_eq!(primes_up_to(199), brute);
    }
}
