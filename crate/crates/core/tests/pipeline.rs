use goodred_core::bounds::OdlyzkoTable;
use goodred_core::classfield::parse_unit_fixtures;
use goodred_core::verdict::pipeline::{verify, PipelineInput};
use goodred_core::verdict::{replay, Verdict};

fn input(field: &str) -> PipelineInput {
    PipelineInput {
        field_poly: field.into(),
        ell: 2,
        s: vec![],
        odlyzko: OdlyzkoTable::parse(include_str!("../../../data/odlyzko.csv")).unwrap(),
        unit_fixtures: parse_unit_fixtures(include_str!("../../../data/units.fixture")).unwrap(),
        ext_fixtures: vec![include_str!("../../../data/ext_13.txt").into(), include_str!("../../../data/ext_17.txt").into()],
        modulus_cap: 6,
        wide_places: false,
        seed: 0,
        search_cap: 1_000_000,
    }
}

#[test]
fn sqrt13_end_to_end() {
    let run = verify(&input("x^2 - 13"), false).unwrap();
    let c = &run.certificate;
    eprintln!("{}", c.to_json().lines().filter(|l| l.contains("\"claim\"")).collect::<Vec<_>>().join("\n"));
    assert_eq!(c.verdict, Verdict::NoNonzeroAbelianVariety);
    assert_eq!(run.bounds.degree_cap, 59);
    assert!(run.torsion.certificate.as_ref().unwrap().is_certified());
    let ids: Vec<&str> = c.steps.iter().map(|s| s.id.as_str()).collect();
    assert!(ids.contains(&"condition-1") && ids.contains(&"inert-prime"));
    assert!(c.flags.contains(&"uses-fixtures".to_string()));
    // replay against an independent run
    let again = verify(&input("x^2 - 13"), false).unwrap().certificate;
    assert_eq!(c.to_json(), again.to_json());
    assert!(replay(c, &again).iter().all(|r| r.ok));
}

#[test]
fn sqrt17_end_to_end() {
    let run = verify(&input("x^2 - 17"), false).unwrap();
    eprintln!("{}", run.certificate.to_json().lines().filter(|l| l.contains("\"claim\"")).collect::<Vec<_>>().join("\n"));
    assert!(matches!(run.certificate.verdict, Verdict::ConditionsFail(_)), "{:?}", run.certificate.verdict);
    let fb = verify(&input("x^2 - 17"), true).unwrap().certificate;
    assert_eq!(fb.verdict, Verdict::NoNonzeroAbelianVariety);
    assert!(fb.flags.contains(&"uses-assumptions".to_string()));
}
