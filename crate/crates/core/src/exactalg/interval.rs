//! Certified real intervals with rational endpoints and complex disks.
//!
//! Transcendental functions are evaluated by truncated series whose tails are
//! bounded explicitly; endpoints are rounded outward to dyadic rationals so
//! the sizes stay bounded.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::poly::{int_rat, rat, rat_to_f64};

/// Default working precision in bits.
pub const PREC: u64 = 160;

fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// Largest k/2^bits ≤ x.
pub fn floor_dyadic(x: &BigRational, bits: u64) -> BigRational {
    let s = pow2(bits);
    let num = (x.numer() * &s).div_floor(x.denom());
    BigRational::new(num, s)
}

/// Smallest k/2^bits ≥ x.
pub fn ceil_dyadic(x: &BigRational, bits: u64) -> BigRational {
    let s = pow2(bits);
    let num = (x.numer() * &s).div_ceil(x.denom());
    BigRational::new(num, s)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "empty interval");
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(rat(n))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2)
    }

    pub fn mid_f64(&self) -> f64 {
        rat_to_f64(&self.mid())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Certain comparison; `None` when the intervals overlap.
    pub fn cmp_certain(&self, o: &Self) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn round_out(&self, bits: u64) -> Self {
        RatInterval { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }

    pub fn add(&self, o: &Self) -> Self {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RatInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Self {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("nonempty").clone();
        let hi = c.iter().max().expect("nonempty").clone();
        RatInterval { lo, hi }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        self.mul(&Self::point(k.clone()))
    }

    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(RatInterval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            RatInterval { lo: BigRational::zero(), hi: self.hi.clone().max(-&self.lo) }
        } else if self.hi.is_negative() || self.hi.is_zero() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn hull(&self, o: &Self) -> Self {
        RatInterval { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    /// n-th root of a nonnegative interval, widened by at most 2^-bits per end.
    pub fn nth_root(&self, n: u32, bits: u64) -> Self {
        assert!(!self.lo.is_negative(), "root of negative interval");
        RatInterval { lo: nth_root_floor(&self.lo, n, bits), hi: nth_root_ceil(&self.hi, n, bits) }
    }

    pub fn sqrt(&self, bits: u64) -> Self {
        self.nth_root(2, bits)
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Self::from_int(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self, bits: u64) -> Self {
        assert!(self.lo.is_positive(), "ln of nonpositive interval");
        RatInterval { lo: ln_rat(&self.lo, bits).lo, hi: ln_rat(&self.hi, bits).hi }
    }

    pub fn exp(&self, bits: u64) -> Self {
        RatInterval { lo: exp_rat(&self.lo, bits).lo, hi: exp_rat(&self.hi, bits).hi }
    }

    /// Decimal rendering `[lo, hi]` with `digits` places, rounded outward.
    pub fn to_decimal(&self, digits: usize) -> String {
        format!("[{}, {}]", decimal_floor(&self.lo, digits), decimal_ceil(&self.hi, digits))
    }
}

fn decimal_with(x: &BigRational, digits: usize, up: bool) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let n = x.numer() * &scale;
    let k = if up { n.div_ceil(x.denom()) } else { n.div_floor(x.denom()) };
    let neg = k.is_negative();
    let k = k.abs();
    let (ip, fp) = k.div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits)
    }
}

pub fn decimal_floor(x: &BigRational, digits: usize) -> String {
    decimal_with(x, digits, false)
}

pub fn decimal_ceil(x: &BigRational, digits: usize) -> String {
    decimal_with(x, digits, true)
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(8))
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(6))
    }
}

impl Serialize for RatInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_decimal(10).serialize(s)
    }
}

/// Floor of x^(1/n) at dyadic resolution 2^-bits.
pub fn nth_root_floor(x: &BigRational, n: u32, bits: u64) -> BigRational {
    assert!(!x.is_negative());
    // floor((x * 2^(n*bits))^(1/n)) / 2^bits, with the inner floor taken on the integer part
    let s = pow2(bits * n as u64);
    let v = (x.numer() * s).div_floor(x.denom());
    BigRational::new(v.nth_root(n), pow2(bits))
}

pub fn nth_root_ceil(x: &BigRational, n: u32, bits: u64) -> BigRational {
    let lo = nth_root_floor(x, n, bits);
    let candidate_exact = lo.pow(n as i32) == *x;
    if candidate_exact {
        lo
    } else {
        lo + BigRational::new(BigInt::one(), pow2(bits))
    }
}

/// Exact integer interval for (num/den)^(1/n): both bounds dyadic.
pub fn root_interval(x: &BigRational, n: u32, bits: u64) -> RatInterval {
    RatInterval { lo: nth_root_floor(x, n, bits), hi: nth_root_ceil(x, n, bits) }
}

/// ln(2) enclosure via 2·atanh(1/3).
pub fn ln2(bits: u64) -> RatInterval {
    atanh2(&BigRational::new(BigInt::one(), BigInt::from(3)), bits)
}

/// Enclosure of 2·atanh(z) = ln((1+z)/(1-z)) for 0 ≤ z ≤ 1/2.
fn atanh2(z: &BigRational, bits: u64) -> RatInterval {
    let eps = BigRational::new(BigInt::one(), pow2(bits + 4));
    let z2 = z * z;
    let mut term = z.clone();
    let mut sum = BigRational::zero();
    let mut k = 0i64;
    loop {
        sum += &term / rat(2 * k + 1);
        term = floor_dyadic(&(&term * &z2), bits + 16);
        k += 1;
        // remaining tail ≤ term' / (1 - z²) with term' ≥ true next term (rounding error bounded separately)
        let tail = &term / (BigRational::one() - &z2);
        if tail < eps {
            // truncation of term each step loses < 2^-(bits+16) per step
            let round = BigRational::new(BigInt::from((k + 1) * (k + 1)), pow2(bits + 16));
            let lo = &sum * rat(2);
            let hi = (&sum + &tail + &tail + &round) * rat(2);
            return RatInterval { lo: floor_dyadic(&lo, bits + 2), hi: ceil_dyadic(&hi, bits + 2) };
        }
    }
}

/// Enclosure of ln(x) for rational x > 0.
pub fn ln_rat(x: &BigRational, bits: u64) -> RatInterval {
    assert!(x.is_positive());
    if x.is_one() {
        return RatInterval::from_int(0);
    }
    // x = 2^k · y with y ∈ [1, 2)
    let mut k: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut y = x / pow2_signed(k);
    while y >= rat(2) {
        y /= rat(2);
        k += 1;
    }
    while y < BigRational::one() {
        y *= rat(2);
        k -= 1;
    }
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let ly = atanh2(&z, bits + 8);
    let l2 = ln2(bits + 8 + 64);
    ly.add(&l2.scale(&rat(k))).round_out(bits)
}

fn pow2_signed(k: i64) -> BigRational {
    if k >= 0 {
        int_rat(&pow2(k as u64))
    } else {
        BigRational::new(BigInt::one(), pow2((-k) as u64))
    }
}

/// Enclosure of exp(x) for rational x.
pub fn exp_rat(x: &BigRational, bits: u64) -> RatInterval {
    if x.is_zero() {
        return RatInterval::from_int(1);
    }
    // halve until |x| ≤ 1/2, evaluate the Taylor series, square back
    let mut s = 0u64;
    let mut r = x.clone();
    while r.abs() > BigRational::new(BigInt::one(), BigInt::from(2)) {
        r /= rat(2);
        s += 1;
    }
    let work = bits + 2 * s + 16;
    let eps = BigRational::new(BigInt::one(), pow2(work));
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    let mut k = 0i64;
    let ra = r.abs();
    let mut lo_err = BigRational::zero();
    loop {
        sum += &term;
        k += 1;
        let next = &term * &r / rat(k);
        let rounded = floor_dyadic(&next, work);
        lo_err += (&next - &rounded).abs();
        term = rounded;
        // |tail| ≤ |term| · 2 when |r| ≤ 1/2
        let tail = term.abs() * rat(2);
        if tail < eps && ra <= BigRational::one() {
            let err = tail + &lo_err * rat(2);
            let mut iv = RatInterval { lo: &sum - &err, hi: &sum + &err };
            for _ in 0..s {
                iv = iv.mul(&iv).round_out(work);
            }
            return iv.round_out(bits);
        }
    }
}

/// Complex disk: center (re, im) with a rational radius.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CDisk {
    pub re: BigRational,
    pub im: BigRational,
    pub rad: BigRational,
}

impl CDisk {
    pub fn exact(re: BigRational, im: BigRational) -> Self {
        CDisk { re, im, rad: BigRational::zero() }
    }

    pub fn real(x: BigRational) -> Self {
        Self::exact(x, BigRational::zero())
    }

    /// Upper bound of |center|.
    pub fn center_abs_upper(&self) -> BigRational {
        let n2 = &self.re * &self.re + &self.im * &self.im;
        nth_root_ceil(&n2, 2, PREC)
    }

    pub fn center_abs_lower(&self) -> BigRational {
        let n2 = &self.re * &self.re + &self.im * &self.im;
        nth_root_floor(&n2, 2, PREC)
    }

    /// Enclosure of |z| over the disk.
    pub fn abs(&self) -> RatInterval {
        let lo = self.center_abs_lower() - &self.rad;
        let lo = if lo.is_negative() { BigRational::zero() } else { lo };
        RatInterval { lo, hi: self.center_abs_upper() + &self.rad }
    }

    pub fn add(&self, o: &Self) -> Self {
        CDisk { re: &self.re + &o.re, im: &self.im + &o.im, rad: &self.rad + &o.rad }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CDisk { re: &self.re - &o.re, im: &self.im - &o.im, rad: &self.rad + &o.rad }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            BigRational::zero()
        } else {
            self.center_abs_upper() * &o.rad + o.center_abs_upper() * &self.rad + &self.rad * &o.rad
        };
        CDisk { re, im, rad }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        CDisk { re: &self.re * k, im: &self.im * k, rad: &self.rad * k.abs() }
    }

    /// Rounds the center to dyadics, absorbing the change into the radius.
    pub fn round(&self, bits: u64) -> Self {
        let re = floor_dyadic(&self.re, bits);
        let im = floor_dyadic(&self.im, bits);
        let shift = BigRational::new(BigInt::from(2), pow2(bits));
        let rad = if self.rad.is_zero() && re == self.re && im == self.im {
            BigRational::zero()
        } else {
            ceil_dyadic(&(&self.rad + shift), bits)
        };
        CDisk { re, im, rad }
    }

    pub fn contains_zero(&self) -> bool {
        let n2 = &self.re * &self.re + &self.im * &self.im;
        n2 <= &self.rad * &self.rad
    }

    pub fn re_interval(&self) -> RatInterval {
        RatInterval { lo: &self.re - &self.rad, hi: &self.re + &self.rad }
    }

    pub fn im_interval(&self) -> RatInterval {
        RatInterval { lo: &self.im - &self.rad, hi: &self.im + &self.rad }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn roots_enclose() {
        let iv = root_interval(&rat(13), 2, 40);
        assert!(iv.lo < iv.hi);
        assert!(&iv.lo * &iv.lo <= rat(13) && &iv.hi * &iv.hi >= rat(13));
        assert_eq!(root_interval(&rat(16), 4, 20), RatInterval::from_int(2));
        assert_eq!(root_interval(&rat(13), 2, 40).to_decimal(4), "[3.6055, 3.6056]");
    }

    #[test]
    fn log_and_exp() {
        let l = ln2(100);
        assert!(l.contains(&r(693147180559945, 1_000_000_000_000_000)) || l.width() < r(1, 1 << 40));
        assert!((l.mid_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        let e = exp_rat(&rat(1), 100);
        assert!((e.mid_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(e.width() < r(1, 1 << 60));
        let back = ln_rat(&e.lo, 100);
        assert!(back.lo < rat(1) && back.hi > rat(1) - r(1, 1 << 50));
        let x = ln_rat(&r(3, 2) , 80).add(&ln_rat(&r(2, 3), 80));
        assert!(x.contains_zero());
        let big = exp_rat(&rat(-20), 80);
        assert!((big.mid_f64() - (-20f64).exp()).abs() < 1e-20);
        let lb = ln_rat(&rat(1_000_000), 80);
        assert!((lb.mid_f64() - 1e6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn disk_product_encloses() {
        let a = CDisk { re: rat(1), im: rat(1), rad: r(1, 100) };
        let b = CDisk { re: rat(2), im: rat(-1), rad: r(1, 100) };
        let c = a.mul(&b);
        // (1+i)(2-i) = 3 + i
        assert_eq!((c.re.clone(), c.im.clone()), (rat(3), rat(1)));
        assert!(c.rad > BigRational::zero());
        assert!(c.abs().contains(&nth_root_floor(&rat(10), 2, 30)));
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal_floor(&r(-1, 3), 3), "-0.334");
        assert_eq!(decimal_ceil(&r(1, 3), 3), "0.334");
        assert_eq!(decimal_floor(&r(5, 1), 0), "5");
    }
}
