use goodred_core::filtration::{
    dual_filtration, etale_decomposition, force_subobject, isotypic_split, model_check, piece_counts, ExtEntry, ExtTable,
    ExtValue, FiltrationObject, LabelClass, Provenance, Quiver, SimpleLabel, MAX_MODEL_DIMENSION,
};
use proptest::prelude::*;

#[test]
fn rewrites_are_realized_by_every_model_object() {
    for lemma in ["force_subobject", "isotypic_split", "etale_decomposition"] {
        let r = model_check(lemma, MAX_MODEL_DIMENSION, &Quiver::standard()).unwrap();
        assert!(r.counterexamples.is_empty(), "{lemma}: {:?}", &r.counterexamples[..r.counterexamples.len().min(5)]);
        assert!(r.objects > 1000, "{lemma}: {} objects", r.objects);
        assert!(r.applied > 0, "{lemma}: {r:?}");
        if lemma == "etale_decomposition" {
            // Condition (1) holds in the standard model, so nothing is refused
            assert_eq!((r.refused, r.blocked_instances), (0, 0));
        } else {
            assert!(r.refused > 0, "{lemma}: {r:?}");
        }
    }
}

#[test]
fn etale_decomposition_refuses_when_condition_one_fails() {
    let r = model_check("etale_decomposition", MAX_MODEL_DIMENSION, &Quiver::violating_condition_one()).unwrap();
    assert_eq!(r.applied, 0);
    assert!(r.refused > 0);
    // the refusal is necessary: some objects have no filtration with the étale part on top
    assert!(r.blocked_instances > 0);
    assert!(r.counterexamples.is_empty());
}

fn table() -> ExtTable {
    let simples = vec![
        SimpleLabel::new("Z/2Z", LabelClass::Etale, "mu_2"),
        SimpleLabel::new("mu_2", LabelClass::Multiplicative, "Z/2Z"),
        SimpleLabel::new("G_pi", LabelClass::Other, "G_pibar"),
        SimpleLabel::new("G_pibar", LabelClass::Other, "G_pi"),
    ];
    let mut t = ExtTable::new(simples).unwrap();
    for (a, b) in [("mu_2", "Z/2Z"), ("G_pi", "Z/2Z"), ("G_pibar", "Z/2Z"), ("G_pi", "G_pibar"), ("mu_2", "G_pi")] {
        t.set(a, b, ExtEntry::new(ExtValue::Zero, Provenance::Computed, "test")).unwrap();
    }
    t
}

fn filtration() -> impl Strategy<Value = FiltrationObject> {
    prop::collection::vec(prop::sample::select(vec!["Z/2Z", "mu_2", "G_pi", "G_pibar"]), 1..8)
        .prop_map(|v| FiltrationObject::from_labels(&v))
}

proptest! {
    #[test]
    fn force_preserves_pieces(j in filtration(), a in prop::sample::select(vec!["Z/2Z", "mu_2", "G_pi", "G_pibar"])) {
        let t = table();
        if let Ok(out) = force_subobject(&j, a, &t) {
            prop_assert_eq!(&out.pieces[0], a);
            prop_assert_eq!(piece_counts(&out), piece_counts(&j));
            prop_assert_eq!(out.flags.len() + 1, out.len());
        }
    }

    #[test]
    fn isotypic_split_separates(j in filtration(), a in prop::sample::select(vec!["Z/2Z", "mu_2", "G_pi", "G_pibar"])) {
        let t = table();
        if let Ok((sub, rest)) = isotypic_split(&j, a, &t) {
            prop_assert!(sub.pieces.iter().all(|p| p == a));
            prop_assert!(rest.pieces.iter().all(|p| p != a));
            prop_assert_eq!(sub.len() + rest.len(), j.len());
        }
    }

    #[test]
    fn etale_decomposition_is_idempotent(j in filtration()) {
        let t = table();
        let (sub, quot) = etale_decomposition(&j, &t).unwrap();
        prop_assert!(quot.pieces.iter().all(|p| p == "Z/2Z"));
        prop_assert!(sub.pieces.iter().all(|p| p != "Z/2Z"));
        let joined = FiltrationObject::new([sub.pieces.clone(), quot.pieces.clone()].concat());
        let (sub2, quot2) = etale_decomposition(&joined, &t).unwrap();
        prop_assert_eq!(sub2.pieces, sub.pieces);
        prop_assert_eq!(quot2.pieces, quot.pieces);
    }

    #[test]
    fn duality_is_an_involution_swapping_counts(j in filtration()) {
        let t = table();
        let d = dual_filtration(&j, &t).unwrap();
        prop_assert_eq!(&dual_filtration(&d, &t).unwrap(), &j);
        let c = piece_counts(&j);
        let cd = piece_counts(&d);
        prop_assert_eq!(c.get("Z/2Z"), cd.get("mu_2"));
        prop_assert_eq!(c.get("mu_2"), cd.get("Z/2Z"));
    }
}
