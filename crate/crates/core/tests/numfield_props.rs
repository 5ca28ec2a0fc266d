use goodred_core::exactalg::intfactor::{is_squarefree, primes_up_to};
use goodred_core::exactalg::rat;
use goodred_core::numfield::quadratic::quadratic_parts;
use goodred_core::numfield::{compositum, parse_field, quadratic_field, real_quadratic_unit, NumberField};
use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Expected (e, f) list for p in Q(√d), from a brute-force square search.
fn kronecker_oracle(d: i64, p: u64) -> Vec<(u32, u32)> {
    let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
    if disc.rem_euclid(p as i64) == 0 {
        return vec![(2, 1)];
    }
    let (modulus, target) = if p == 2 { (8, d.rem_euclid(8)) } else { (p as i64, d.rem_euclid(p as i64)) };
    let is_square = (0..modulus).any(|x| (x * x) % modulus == target);
    if is_square {
        vec![(1, 1), (1, 1)]
    } else {
        vec![(1, 2)]
    }
}

#[test]
fn splitting_matches_kronecker_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let primes = primes_up_to(60);
    let mut checked = 0;
    let mut fields: std::collections::HashMap<i64, NumberField> = Default::default();
    while checked < 200 {
        let d: i64 = rng.gen_range(-60..=60);
        if d == 0 || d == 1 || !is_squarefree(&BigInt::from(d)) {
            continue;
        }
        let p = primes[rng.gen_range(0..primes.len())];
        let k = fields.entry(d).or_insert_with(|| quadratic_field(d).unwrap());
        let got: Vec<(u32, u32)> = k.factor_prime(p).unwrap().iter().map(|q| (q.e, q.f)).collect();
        assert_eq!(got, kronecker_oracle(d, p), "d = {d}, p = {p}");
        checked += 1;
    }
}

#[test]
fn fundamental_units_are_minimal() {
    for d in 2..=50i64 {
        if !is_squarefree(&BigInt::from(d)) {
            continue;
        }
        let (k, eps) = real_quadratic_unit(d).unwrap();
        assert_eq!(k.norm(&eps).abs(), rat(1));
        let (a, b) = quadratic_parts(&k, d, &eps).unwrap();
        // ε = (x + y√d)/2 with x² − d·y² = ±4
        let x = (a * rat(2)).to_integer().to_i64().unwrap();
        let y = (b * rat(2)).to_integer().to_i64().unwrap();
        assert!(x > 0 && y > 0);
        let half_ok = d % 4 == 1;
        for yy in 1..=y {
            for sign in [-4i64, 4] {
                let xx2 = d * yy * yy + sign;
                if xx2 <= 0 {
                    continue;
                }
                let xx = xx2.sqrt();
                if xx * xx != xx2 || (!half_ok && (xx % 2 != 0 || yy % 2 != 0)) {
                    continue;
                }
                assert!((yy, xx) >= (y, x), "d = {d}: smaller unit ({xx} + {yy}√d)/2");
            }
        }
    }
}

#[test]
fn compositum_is_commutative() {
    let pairs = [("x^2+1", "x^2-13"), ("x^2-2", "x^2-3"), ("x^2+3", "x^3-2")];
    for (a, b) in pairs {
        let fa = parse_field(a).unwrap();
        let fb = parse_field(b).unwrap();
        let (l1, _, _) = compositum(&fa, &fb).unwrap();
        let (l2, _, _) = compositum(&fb, &fa).unwrap();
        assert_eq!(l1.degree(), l2.degree());
        assert_eq!(l1.disc(), l2.disc());
    }
}

fn small_field() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("x^2-13"), Just("x^2+5"), Just("x^3-x-1"), Just("x^4-3x^2-1")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ideal_norm_is_multiplicative(
        f in small_field(),
        a in prop::collection::vec(-6i64..6, 4),
        b in prop::collection::vec(-6i64..6, 4),
    ) {
        let k = parse_field(f).unwrap();
        let n = k.degree();
        let ea = goodred_core::numfield::FieldElement::from_ints(&a[..n].iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        let eb = goodred_core::numfield::FieldElement::from_ints(&b[..n].iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        prop_assume!(!ea.is_zero() && !eb.is_zero());
        let ia = k.principal_ideal(&ea).unwrap();
        let ib = k.principal_ideal(&eb).unwrap();
        let iab = k.ideal_mul(&ia, &ib);
        prop_assert_eq!(iab.norm(), &(ia.norm() * ib.norm()));
        prop_assert_eq!(ia.norm(), &k.norm(&ea).abs().to_integer());
        // sum with a prime ideal keeps the norm multiplicative too
        let p = k.factor_prime(2).unwrap().remove(0).ideal;
        let ip = k.ideal_mul(&ia, &p);
        prop_assert_eq!(ip.norm(), &(ia.norm() * p.norm()));
    }

    #[test]
    fn splitting_degrees_sum_to_degree(f in small_field(), pi in 0usize..10) {
        let k = parse_field(f).unwrap();
        let p = primes_up_to(30)[pi];
        let total: u32 = k.factor_prime(p).unwrap().iter().map(|q| q.e * q.f).sum();
        prop_assert_eq!(total as usize, k.degree());
        let (r1, r2) = k.signature();
        prop_assert_eq!(r1 + 2 * r2, k.degree());
    }
}
