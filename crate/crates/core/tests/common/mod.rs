#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use locidx::algebra::{jet_invert, jet_mul, jet_project, GaussianRational as G, NormalJet, Polynomial, RationalFunction as RF};
use locidx::parser::{parse_expression, serialize_expression};

pub const VARS: [&str; 3] = ["x", "y", "t"];

pub fn vars() -> Vec<String> {
    VARS.iter().map(|s| s.to_string()).collect()
}

pub fn normal() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

pub fn coeff() -> impl Strategy<Value = G> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3)
        .prop_map(|(a, b, c, d)| &G::from_ratio(a, b) + &(&G::i() * &G::from_ratio(c, d)))
}

pub fn term(vs: &'static [&'static str], max: u32) -> impl Strategy<Value = (Vec<u32>, G)> {
    (proptest::collection::vec(0..=max, vs.len()), coeff())
}

pub fn poly_in(vs: &'static [&'static str], max: u32, terms: usize) -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec(term(vs, max), 0..=terms).prop_map(move |ts| {
        let mut p = Polynomial::zero();
        for (e, c) in ts {
            let m: Vec<(String, u32)> = vs.iter().zip(e).filter(|(_, k)| *k > 0).map(|(v, k)| (v.to_string(), k)).collect();
            p = &p + &Polynomial::monomial(m, c);
        }
        p
    })
}

pub fn poly() -> impl Strategy<Value = Polynomial> {
    poly_in(&VARS, 3, 4)
}

pub fn nonzero_poly() -> impl Strategy<Value = Polynomial> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

pub fn rf() -> impl Strategy<Value = RF> {
    (poly_in(&VARS, 2, 3), poly_in(&VARS, 2, 3).prop_filter("nonzero", |p| !p.is_zero())).prop_map(|(n, d)| RF::new(n, d).expect("nonzero denominator"))
}

pub fn leibniz(f: &RF, g: &RF, v: &str) -> Result<(), TestCaseError> {
    let lhs = (f * g).derivative(v);
    let rhs = &(&f.derivative(v) * g) + &(f * &g.derivative(v));
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// Unit jet `u + x * rest` of order `k` times its inverse is one.
pub fn jet_inverse(u: Polynomial, rest: &Polynomial, k: u32) -> Result<(), TestCaseError> {
    let n = normal();
    let p = &RF::from_poly(u) + &RF::from_poly(rest * &Polynomial::var("x"));
    let j = jet_project(&p, &n, k).unwrap();
    let inv = jet_invert(&j).unwrap();
    prop_assert_eq!(jet_mul(&j, &inv), NormalJet::one(&n, k));
    prop_assert_eq!(jet_mul(&inv, &j), NormalJet::one(&n, k));
    Ok(())
}

pub fn unit_part() -> impl Strategy<Value = Polynomial> {
    let zero = BTreeMap::from([("x".to_string(), Polynomial::zero()), ("y".to_string(), Polynomial::zero())]);
    nonzero_poly().prop_map(move |p| p.compose(&zero)).prop_filter("unit", |p| !p.is_zero())
}

pub fn valuation(p: Polynomial, q: Polynomial) -> Result<(), TestCaseError> {
    let n = normal();
    let (a, b) = (RF::from_poly(p), RF::from_poly(q));
    let oa = a.ideal_order(&n).unwrap().unwrap();
    let ob = b.ideal_order(&n).unwrap().unwrap();
    prop_assert_eq!((&a * &b).ideal_order(&n).unwrap(), Some(oa + ob));
    Ok(())
}

pub fn roundtrip(f: &RF) -> Result<(), TestCaseError> {
    let s = serialize_expression(f);
    let back = parse_expression(&s, &vars()).unwrap();
    prop_assert_eq!(&back, f, "{}", s);
    prop_assert_eq!(serialize_expression(&back), s);
    Ok(())
}
