mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use locidx::algebra::{GaussianRational as G, Polynomial};
use locidx::harness::corpus::corpus_text;
use locidx::harness::{residue_at_point, run_verification, Verdict};
use locidx::parser::manifest::{parse_manifest, parse_manifest_with};
use locidx::parser::parse_expression;
use locidx::residue::{grothendieck_residue, GrothendieckData};

fn ratio() -> impl Strategy<Value = G> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| G::from_ratio(n, d))
}

fn nonzero_ratio() -> impl Strategy<Value = G> {
    ratio().prop_filter("nonzero", |g| !g.is_zero())
}

const DENOMINATORS: [[&str; 2]; 4] = [["x + y", "x - y"], ["x^2", "y"], ["x^2 - y", "y"], ["x + y^2", "y^3"]];

fn residue(num: &Polynomial, dens: &[&str; 2]) -> G {
    let vars: Vec<String> = vec!["x".into(), "y".into()];
    let p = |s: &str| parse_expression(s, &vars).unwrap().num().clone();
    grothendieck_residue(&GrothendieckData {
        vars: vars.clone(),
        point: vec![G::zero(), G::zero()],
        denominators: dens.iter().map(|d| p(d)).collect(),
        numerator: num.clone(),
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exact_scalars_survive_text(c in common::coeff()) {
        let s = c.to_string();
        let back = parse_expression(&s, &[]).unwrap().as_constant().unwrap_or_else(G::zero);
        prop_assert_eq!(back, c);
        let json = serde_json::to_string(&s).unwrap();
        let again: String = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(again, s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn grothendieck_is_linear(h1 in common::poly_in(&["x", "y"], 4, 4), h2 in common::poly_in(&["x", "y"], 4, 4),
                              c in common::coeff(), k in 0usize..4) {
        let d = &DENOMINATORS[k];
        let lhs = residue(&(&h1 + &h2.scale(&c)), d);
        let rhs = &residue(&h1, d) + &(&c * &residue(&h2, d));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn index_ignores_unit_rescaling(l1 in nonzero_ratio(), l2 in nonzero_ratio(), a in ratio(), b in ratio()) {
        let text = format!(
            "model rescaled\nchart A normal(x) tangential(y)\nsubmanifold S codim 1\n\
             foliation v in A generators {{ (1 + ({})*x + ({})*y)*(({})*x*d/dx + ({})*y*d/dy) }}\npoint v in A {{ y = 0 }}\n",
            a, b, l1, l2
        );
        let bundle = parse_manifest(&text).unwrap();
        let r = residue_at_point(&bundle, None, "A", &BTreeMap::from([("y".to_string(), G::zero())]), None).unwrap();
        prop_assert_eq!(r, &l1 / &l2);
    }

    #[test]
    fn p2_line_sum_is_degree(l in nonzero_ratio().prop_filter("not one", |g| !g.is_one())) {
        let b = parse_manifest_with(corpus_text("p2_line").unwrap(), &BTreeMap::from([("l".to_string(), l.clone())])).unwrap();
        let r = run_verification(&b);
        prop_assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.reason);
        prop_assert_eq!(r.objects[0].sum.as_deref(), Some("1"));
    }

    #[test]
    fn blowup_sum_is_degree(l1 in nonzero_ratio(), l2 in nonzero_ratio()) {
        prop_assume!(l1 != l2);
        let params = BTreeMap::from([("l1".to_string(), l1), ("l2".to_string(), l2)]);
        let b = parse_manifest_with(corpus_text("blowup_foliation").unwrap(), &params).unwrap();
        let r = run_verification(&b);
        prop_assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.reason);
        prop_assert_eq!(r.objects[0].sum.as_deref(), Some("-1"));
    }
}
