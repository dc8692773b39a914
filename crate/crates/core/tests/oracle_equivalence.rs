//! Canonical enumeration against a brute-force walk of the same structure.

use propbridge_core::{
    base_cardinality, booleans, cardinality, enumerate, i32_range, just, list_of, one_of,
    optional_of, ordered_map_of, pattern_strategy, tuple_of, Strategy, Value,
};
use propbridge_oracles::brute;
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn sorted(mut v: Vec<Value>) -> Vec<Value> {
    v.sort();
    v
}

fn enumerated(s: &Strategy) -> Vec<Value> {
    enumerate(s, None)
        .expect("small domain")
        .map(|r| r.expect("filter-free"))
        .collect()
}

fn check(s: &Strategy) {
    let got = enumerated(s);
    let want = brute::values(s);
    assert_eq!(Some(got.len() as u64), cardinality(s).finite());
    assert_eq!(sorted(got), sorted(want));
}

#[derive(Clone, Debug)]
enum Shape {
    Range(i32, i32),
    Just(i32),
    Bools,
    Doubled(Box<Shape>),
    OneOf(Vec<Shape>),
    Tuple(Vec<Shape>),
    Optional(Box<Shape>),
    List(Box<Shape>, usize, usize),
    Map(i32, Box<Shape>, usize, usize),
}

fn build(s: &Shape) -> Strategy {
    match s {
        Shape::Range(lo, len) => i32_range(*lo, lo + len).unwrap(),
        Shape::Just(v) => just(*v as i64),
        Shape::Bools => booleans(),
        Shape::Doubled(inner) => build(inner).map(|v| match v {
            Value::Int(i) => Value::Int(2 * i),
            other => Value::Tuple(vec![other.clone(), other]),
        }),
        Shape::OneOf(alts) => one_of(alts.iter().map(build).collect()).unwrap(),
        Shape::Tuple(items) => tuple_of(items.iter().map(build).collect()),
        Shape::Optional(inner) => optional_of(build(inner)),
        Shape::List(inner, min, extra) => list_of(build(inner), *min, min + extra).unwrap(),
        Shape::Map(keys, vals, min, extra) => {
            ordered_map_of(i32_range(0, *keys).unwrap(), build(vals), *min, min + extra).unwrap()
        }
    }
}

fn shape() -> impl proptest::strategy::Strategy<Value = Shape> {
    let leaf = prop_oneof![
        (-20i32..20, 0i32..5).prop_map(|(lo, len)| Shape::Range(lo, len)),
        (-5i32..5).prop_map(Shape::Just),
        Just(Shape::Bools),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| Shape::Doubled(Box::new(s))),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Shape::OneOf),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Shape::Tuple),
            inner.clone().prop_map(|s| Shape::Optional(Box::new(s))),
            (inner.clone(), 0usize..2, 0usize..3).prop_map(|(s, min, extra)| Shape::List(
                Box::new(s),
                min,
                extra
            )),
            (0i32..4, inner, 0usize..2, 0usize..2).prop_map(|(k, s, min, extra)| Shape::Map(
                k,
                Box::new(s),
                min,
                extra
            )),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_structures_match_brute_force(sh in shape()) {
        let s = build(&sh);
        let n = base_cardinality(&s).finite();
        prop_assume!(n.is_some_and(|n| n <= 10_000));
        check(&s);
    }
}

#[test]
fn fixed_structures_match_brute_force() {
    let r = |lo, hi| i32_range(lo, hi).unwrap();
    check(&tuple_of(vec![r(1, 3), booleans(), optional_of(r(0, 2))]));
    check(&list_of(r(0, 2), 0, 4).unwrap());
    check(&ordered_map_of(r(0, 4), booleans(), 0, 3).unwrap());
    check(&one_of(vec![r(0, 9), r(100, 109), just(5i64)]).unwrap());
    check(&tuple_of(vec![]));
}

#[test]
fn patterns_match_their_language() {
    for p in [
        "[ab]{2}",
        "a|bc",
        "(ab|cd)*",
        "x?y+z",
        "[^a-y]{2}",
        "h(e|a)llo",
        "a{3}b{0,2}c?",
    ] {
        check(&pattern_strategy(p).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_values_and_candidates_stay_in_domain(sh in shape(), seed: u64) {
        let s = build(&sh);
        prop_assume!(base_cardinality(&s).finite().is_some_and(|n| n <= 10_000));
        let domain: std::collections::BTreeSet<Value> = brute::values(&s).into_iter().collect();
        let mut g = propbridge_core::Gen::new(seed);
        for _ in 0..20 {
            let t = propbridge_core::generate(&s, &mut g).unwrap();
            prop_assert!(domain.contains(t.current()), "{}", t.current());
            for c in t.candidates() {
                prop_assert!(domain.contains(c.current()), "{}", c.current());
            }
        }
    }
}
