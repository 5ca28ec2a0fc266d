use goodred_core::bounds::{fontaine_bound, OdlyzkoTable};
use goodred_core::classfield::{class_group, parse_unit_fixtures, s_unit_square_classes, unit_group};
use goodred_core::numfield::quadratic_field;
use goodred_core::schemes::torsion::{cap_modulus, certify_torsion_field, torsion_field_lower, TorsionStatus};

#[test]
fn sqrt13_torsion_field_is_certified_with_fixture_units() {
    let k = quadratic_field(13).unwrap();
    let u = unit_group(&k, None, None).unwrap();
    let c = class_group(&k, Some(&u), 100_000).unwrap();
    let classes = s_unit_square_classes(&k, &[], &u, &c, 100_000).unwrap();
    let lower = torsion_field_lower(&k, 2, &classes).unwrap();
    let fb = fontaine_bound(&k, 2).unwrap();
    let table = OdlyzkoTable::parse(include_str!("../../../data/odlyzko.csv")).unwrap();
    let fixtures = parse_unit_fixtures(include_str!("../../../data/units.fixture")).unwrap();
    let cap = cap_modulus(&lower.field, 2, 6, false).unwrap();
    let cert = certify_torsion_field(&lower, 2, &fb, &table, &cap, &fixtures, 1_000_000).unwrap();
    assert_eq!(cert.status, TorsionStatus::Certified, "{:?}", cert.reason);
    assert_eq!((cert.degree, cert.index_over_base, cert.degree_cap), (8, 4, 59));
    // Q(i, √13) has discriminant 2^4·13^2; √η adds relative discriminant 2^4 over it
    assert_eq!(cert.number_field.disc(), &num_bigint::BigInt::from(4096u64 * 28561));
    assert!(cert.unit_mode.is_some());
    let layer = cert.layers.iter().find(|l| l.degree == 2).unwrap();
    assert!(layer.complete);
    assert!(layer.result.minimum().unwrap().lo > fb.value.hi);
}
