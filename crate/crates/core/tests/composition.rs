use num_bigint::BigInt;
use proptest::prelude::*;
use quadrings::correspondence::{form_to_pair, pair_to_form, CorrespondencePair};
use quadrings::forms::principal_form;
use quadrings::ideal::{class_group, compose_forms, realize_as_ideal, IdealLattice};
use quadrings::verifier::{verify_bijection, VerifierConfig};
use quadrings::{BQForm, Flavor, Ring};

const DISCRIMINANTS: [i64; 12] = [-3, -4, -7, -8, -11, -15, -20, -23, -47, -71, -84, -420];

fn coeffs(f: &BQForm) -> [BigInt; 3] {
    f.int_coeffs().unwrap()
}

#[test]
fn class_groups_satisfy_group_axioms() {
    for d in DISCRIMINANTS {
        let g = class_group(&BigInt::from(d)).unwrap();
        g.check_group_axioms().unwrap();
        let order: u64 = g.invariant_factors.iter().product();
        assert_eq!(order as usize, g.class_number(), "D = {d}");
        let principal = principal_form(&BigInt::from(d)).unwrap();
        assert_eq!(coeffs(&g.forms[0]), coeffs(&principal));
    }
}

#[test]
fn known_class_numbers() {
    let expected = [(-3, 1), (-4, 1), (-7, 1), (-8, 1), (-11, 1), (-15, 2), (-20, 2), (-23, 3), (-47, 5), (-71, 7), (-84, 4), (-420, 8)];
    for (d, h) in expected {
        assert_eq!(class_group(&BigInt::from(d)).unwrap().class_number(), h, "D = {d}");
    }
    assert_eq!(class_group(&BigInt::from(-420)).unwrap().invariant_factors, vec![2, 2, 2]);
}

#[test]
fn opposite_form_is_inverse() {
    for d in DISCRIMINANTS {
        let g = class_group(&BigInt::from(d)).unwrap();
        let identity = coeffs(&g.forms[0]);
        for f in &g.forms {
            let [a, b, c] = coeffs(f);
            let ring = Ring::Integers;
            let opposite = BQForm::new(ring.from_bigint(&a), ring.from_bigint(&-b), ring.from_bigint(&c), Flavor::Plain).unwrap();
            let h = compose_forms(f, &opposite).unwrap();
            assert_eq!(coeffs(&h), identity, "D = {d}, f = {f}");
            assert_eq!(h.discriminant(), f.discriminant());
        }
    }
}

#[test]
fn composition_is_independent_of_representative() {
    let f = BQForm::int([2, 1, 3], Flavor::Plain);
    let g = BQForm::int([3, 1, 2], Flavor::Plain);
    let shifted = BQForm::int([2, 5, 6], Flavor::Plain);
    let base = coeffs(&compose_forms(&f, &f).unwrap());
    assert_eq!(coeffs(&compose_forms(&f, &shifted).unwrap()), base);
    assert_eq!(coeffs(&compose_forms(&shifted, &f).unwrap()), base);
    assert_eq!(coeffs(&compose_forms(&g, &f).unwrap()), coeffs(&compose_forms(&g, &shifted).unwrap()));
}

fn form_of(d: i64) -> impl Strategy<Value = (i64, BQForm)> {
    let forms = class_group(&BigInt::from(d)).unwrap().forms;
    (0..forms.len()).prop_map(move |i| (d, forms[i].clone()))
}

proptest! {
    #[test]
    fn composition_is_associative_and_commutative(
        (d, fs) in prop::sample::select(vec![-47i64, -71, -84, -104, -164])
            .prop_flat_map(|d| (Just(d), prop::collection::vec(form_of(d).prop_map(|p| p.1), 3)))
    ) {
        let [f, g, h] = [&fs[0], &fs[1], &fs[2]];
        let left = compose_forms(&compose_forms(f, g).unwrap(), h).unwrap();
        let right = compose_forms(f, &compose_forms(g, h).unwrap()).unwrap();
        prop_assert_eq!(coeffs(&left), coeffs(&right), "D = {}", d);
        prop_assert_eq!(
            coeffs(&compose_forms(f, g).unwrap()),
            coeffs(&compose_forms(g, f).unwrap())
        );
    }

    #[test]
    fn form_and_pair_json_roundtrip(
        a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000,
        flavor in prop::sample::select(vec![Flavor::Plain, Flavor::Twisted, Flavor::Linear]),
        modulus in prop::sample::select(vec![0u64, 2, 3, 4, 5, 12]),
    ) {
        let ring = if modulus == 0 { Ring::Integers } else { Ring::zmod(modulus).unwrap() };
        let f = BQForm::from_i64(ring, [a, b, c], flavor);
        prop_assert_eq!(&BQForm::from_json(&f.to_json()).unwrap(), &f);
        let pair = form_to_pair(&f);
        let parsed = CorrespondencePair::from_json(&pair.to_json()).unwrap();
        prop_assert_eq!(&parsed, &pair);
        prop_assert_eq!(pair_to_form(&parsed).unwrap(), f);
    }

    #[test]
    fn realized_ideal_json_roundtrip(a in 1i64..200, b in -200i64..200, c in 1i64..200) {
        prop_assume!(b * b - 4 * a * c != 0);
        let pair = form_to_pair(&BQForm::int([a, b, c], Flavor::Twisted));
        let ideal = realize_as_ideal(&pair).unwrap().ideal;
        let parsed = IdealLattice::from_json(&ideal.to_json()).unwrap();
        prop_assert_eq!(parsed, ideal);
    }
}

#[test]
fn bijection_holds_over_zmod_4_for_every_flavor() {
    let ring = Ring::zmod(4).unwrap();
    for flavor in [Flavor::Plain, Flavor::Twisted, Flavor::Linear] {
        let report = verify_bijection(ring, flavor, VerifierConfig::default()).unwrap();
        assert!(report.passed(), "{}", report.to_text());
    }
}
