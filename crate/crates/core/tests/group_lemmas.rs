use std::collections::BTreeSet;

use goodred_core::schemes::groups::{ell_core, FiniteGroup};
use goodred_core::schemes::lemmas::{check_cyclic_pgroup, check_divisibility_lemma, divisibility_instances, parse_group_catalog};
use goodred_core::schemes::modules::simple_modules;
use proptest::prelude::*;

const CATALOG: &str = include_str!("../../../data/groups.txt");

/// Raw tables straight from the fixture text, independent of the parser.
fn raw_tables() -> Vec<(String, Vec<Vec<usize>>)> {
    let mut out = Vec::new();
    let mut cur: Option<(String, Vec<Vec<usize>>)> = None;
    for line in CATALOG.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(rest) = line.strip_prefix("group ") {
            cur = Some((rest.split_whitespace().next().unwrap().to_string(), vec![]));
        } else if line == "end" {
            out.push(cur.take().unwrap());
        } else {
            cur.as_mut().unwrap().1.push(line.split_whitespace().map(|x| x.parse().unwrap()).collect());
        }
    }
    out
}

fn table_is_cyclic(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    (0..n).any(|x| {
        let mut seen = BTreeSet::new();
        let mut y = 0;
        for _ in 0..n {
            y = t[y][x];
            seen.insert(y);
        }
        seen.len() == n
    })
}

fn table_inverse(t: &[Vec<usize>], a: usize) -> usize {
    (0..t.len()).find(|&b| t[a][b] == 0).unwrap()
}

/// Subgroup generated by all commutators, by brute-force closure.
fn table_commutator_order(t: &[Vec<usize>]) -> usize {
    let n = t.len();
    let mut h: BTreeSet<usize> = BTreeSet::from([0]);
    for a in 0..n {
        for b in 0..n {
            let c = t[t[table_inverse(t, a)][table_inverse(t, b)]][t[a][b]];
            h.insert(c);
        }
    }
    loop {
        let next: BTreeSet<usize> = h.iter().flat_map(|&x| h.iter().map(move |&y| t[x][y])).collect();
        if next.len() == h.len() {
            return h.len();
        }
        h = next;
    }
}

#[test]
fn catalog_covers_every_group_of_order_p_to_p_cubed() {
    let groups = parse_group_catalog(CATALOG).unwrap();
    let counts: Vec<(usize, usize)> = [2, 4, 8, 3, 9, 27]
        .iter()
        .map(|&n| (n, groups.iter().filter(|g| g.group.order() == n).count()))
        .collect();
    // 1, 2, 5 groups of order 2, 4, 8 and 1, 2, 5 of order 3, 9, 27
    assert_eq!(counts, vec![(2, 1), (4, 2), (8, 5), (3, 1), (9, 2), (27, 5)]);
    // pairwise non-isomorphic: element-order profile plus commutativity separates them
    let mut sigs = BTreeSet::new();
    for g in &groups {
        let mut orders: Vec<usize> = (0..g.group.order()).map(|x| g.group.element_order(x)).collect();
        orders.sort_unstable();
        sigs.insert((orders, g.group.is_abelian()));
    }
    assert_eq!(sigs.len(), 16);
}

#[test]
fn abelianization_cyclic_iff_cyclic_over_catalog() {
    let groups = parse_group_catalog(CATALOG).unwrap();
    let raw = raw_tables();
    assert_eq!(groups.len(), raw.len());
    for (g, (name, t)) in groups.iter().zip(&raw) {
        assert_eq!(&g.name, name);
        let lemma = check_cyclic_pgroup(&g.group).unwrap();
        assert_eq!(lemma, table_is_cyclic(t), "{name}");
        assert_eq!(g.group.commutator_subgroup().len(), table_commutator_order(t), "{name}");
    }
}

#[test]
fn quaternion_abelianization_is_klein_four() {
    let groups = parse_group_catalog(CATALOG).unwrap();
    let q8 = groups.iter().find(|g| g.name == "Q8").unwrap();
    let (_, t) = raw_tables().into_iter().find(|(n, _)| n == "Q8").unwrap();
    assert_eq!(table_commutator_order(&t), 2);
    let ab = q8.group.quotient(&q8.group.commutator_subgroup()).unwrap();
    assert_eq!(ab.order(), 4);
    assert!(!ab.is_cyclic());
    assert!(!check_cyclic_pgroup(&q8.group).unwrap());
}

#[test]
fn non_prime_power_orders_are_rejected() {
    assert!(check_cyclic_pgroup(&FiniteGroup::cyclic(6)).is_err());
    assert!(check_cyclic_pgroup(&FiniteGroup::symmetric(3)).is_err());
}

#[test]
fn divisibility_over_constructed_extensions() {
    let instances = divisibility_instances(64);
    let mut faithful = 0;
    for inst in &instances {
        let c = check_divisibility_lemma(&inst.extension, &inst.group, &inst.action).unwrap();
        assert!(c.faithful);
        assert!(c.divides, "#G = {} does not divide #A^k for {:?}", c.group_order, inst.extension);
        assert!(c.holds());
        faithful += 1;
    }
    assert!(faithful >= 50, "only {faithful} instances");
}

#[test]
fn galois_group_of_the_octic_has_only_the_trivial_module() {
    // Gal(Q(i, √η)/Q(√13)) ≅ (Z/2)²
    let g = FiniteGroup::elementary_abelian(2, 2);
    assert_eq!(ell_core(&g, 2).len(), 4);
    let ms = simple_modules(&g, 2, 0).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].dimension, 1);
}

fn random_perm_group() -> impl Strategy<Value = FiniteGroup> {
    let perm = Just((0u16..5).collect::<Vec<u16>>()).prop_shuffle();
    prop::collection::vec(perm, 1..3).prop_map(|gens| FiniteGroup::from_generators(5, gens).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ell_core_is_a_normal_ell_subgroup_with_trivial_quotient_core(g in random_perm_group(), ell in prop::sample::select(vec![2usize, 3, 5])) {
        let core = ell_core(&g, ell);
        prop_assert!(g.is_normal(&core));
        let mut n = core.len();
        while n % ell == 0 {
            n /= ell;
        }
        prop_assert_eq!(n, 1);
        let q = g.quotient(&core).unwrap();
        prop_assert_eq!(ell_core(&q, ell).len(), 1);
    }

    #[test]
    fn simple_modules_fill_the_regular_module(g in random_perm_group(), ell in prop::sample::select(vec![2u64, 3])) {
        let q = g.order() / ell_core(&g, ell as usize).len();
        prop_assume!(q <= 64);
        let ms = simple_modules(&g, ell, 1).unwrap();
        prop_assert_eq!(ms.iter().map(|m| m.dimension * m.regular_multiplicity).sum::<usize>(), q);
    }
}
