mod common;

use proptest::prelude::*;

use common::*;
use locidx::algebra::RationalFunction as RF;
use locidx::atlas::degree::order_at_zero;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn leibniz_rule(f in rf(), g in rf(), v in 0usize..3) {
        leibniz(&f, &g, VARS[v])?;
    }

    #[test]
    fn jet_inverse_identity(u in unit_part(), rest in poly(), k in 1u32..=4) {
        jet_inverse(u, &rest, k)?;
    }

    #[test]
    fn valuation_additivity(p in nonzero_poly(), q in nonzero_poly()) {
        valuation(p, q)?;
    }

    #[test]
    fn order_at_zero_additivity(p in poly_in(&["t"], 4, 3).prop_filter("nonzero", |p| !p.is_zero()),
                                q in poly_in(&["t"], 4, 3).prop_filter("nonzero", |p| !p.is_zero()),
                                d in poly_in(&["t"], 4, 3).prop_filter("nonzero", |p| !p.is_zero())) {
        let a = RF::from_poly(p);
        let b = RF::new(q, d).unwrap();
        let (oa, ob) = (order_at_zero(&a, "t").unwrap(), order_at_zero(&b, "t").unwrap());
        prop_assert_eq!(order_at_zero(&(&a * &b), "t"), Some(oa + ob));
        prop_assert_eq!(order_at_zero(&b.inv().unwrap(), "t"), Some(-ob));
    }

    #[test]
    fn parse_serialize_roundtrip(f in rf()) {
        roundtrip(&f)?;
    }
}
