//! The built-in property corpus: the multiply harness, its mutant, and a
//! spread of provable, falsifiable and out-of-fragment properties.

use propbridge_core::{
    booleans, filter, i32_range, list_of, one_of, optional_of, ordered_map_of, pattern_strategy,
    tuple_of, u32_range, u64_range, u8_range, Bool, Fault, Int, Property, Strategy, Term, Value,
};

use crate::registry::Registry;

fn pair(a: Strategy, b: Strategy) -> Strategy {
    tuple_of(vec![a, b])
}

fn u32s(lo: u32, hi: u32) -> Strategy {
    u32_range(lo, hi).expect("corpus ranges are valid")
}

fn i32s(lo: i32, hi: i32) -> Strategy {
    i32_range(lo, hi).expect("corpus ranges are valid")
}

fn pattern(p: &str) -> Strategy {
    pattern_strategy(p).expect("corpus patterns parse")
}

fn value_of(t: &Term) -> Result<Value, Fault> {
    t.value()
}

fn string_of(t: &Term) -> Result<String, Fault> {
    match value_of(t)? {
        Value::Str(s) => Ok(s),
        other => Err(Fault::Failed(format!("expected a string, found {other}"))),
    }
}

fn ints_of(t: &Term) -> Result<Vec<i128>, Fault> {
    match value_of(t)? {
        Value::List(items) => items
            .iter()
            .map(|v| {
                v.as_int()
                    .ok_or_else(|| Fault::Failed(format!("expected an integer, found {v}")))
            })
            .collect(),
        other => Err(Fault::Failed(format!("expected a list, found {other}"))),
    }
}

/// `a in 1..=1000u32, b in 1..=1000u32; assert 1 <= a*b <= 1000000`.
pub fn multiply() -> Property {
    Property::new("multiply", pair(u32s(1, 1000), u32s(1, 1000)), |t| {
        let r = t.int_at(0)? * t.int_at(1)?;
        Ok(r.ge(1) & r.le(1_000_000))
    })
    .expect("valid name")
    .with_tags(["paper", "provable"])
}

/// The multiply harness with the assertion tightened to `a*b < 1000000`.
pub fn multiply_mutated() -> Property {
    Property::new(
        "multiply_mutated",
        pair(u32s(1, 1000), u32s(1, 1000)),
        |t| {
            let r = t.int_at(0)? * t.int_at(1)?;
            Ok(r.lt(1_000_000))
        },
    )
    .expect("valid name")
    .with_tags(["paper", "falsifiable"])
}

fn others() -> Vec<Property> {
    let mut v = Vec::new();
    let mut add = |name: &str, tags: &[&str], s: Strategy, p: fn(&Term) -> Result<Bool, Fault>| {
        v.push(
            Property::new(name, s, p)
                .expect("valid name")
                .with_tags(tags.iter().copied()),
        );
    };

    add(
        "add_commutes",
        &["undecided"],
        pair(i32s(-1000, 1000), i32s(-1000, 1000)),
        |t| {
            let (a, b) = (t.int_at(0)?, t.int_at(1)?);
            Ok((&a + &b).equals(&b + &a))
        },
    );
    add("square_nonneg", &["provable"], i32s(-1000, 1000), |t| {
        let x = t.int()?;
        Ok((&x * &x).ge(0))
    });
    add(
        "abs_nonneg",
        &["provable", "host-branch"],
        i32s(-100, 100),
        |t| {
            let x = t.int()?;
            Ok(x.lt(0).select(&-&x, &x).ge(0))
        },
    );
    add(
        "div_rem_identity",
        &["provable"],
        pair(u32s(0, 1000), u32s(1, 50)),
        |t| {
            let (a, b) = (t.int_at(0)?, t.int_at(1)?);
            Ok(((&a / &b) * &b + &a % &b).equals(a))
        },
    );
    add(
        "rem_below_divisor",
        &["provable"],
        pair(u32s(0, 1000), u32s(1, 50)),
        |t| {
            let (a, b) = (t.int_at(0)?, t.int_at(1)?);
            Ok((&a % &b).lt(b))
        },
    );
    add(
        "sum_below_200",
        &["falsifiable"],
        pair(u32s(0, 100), u32s(0, 100)),
        |t| Ok((t.int_at(0)? + t.int_at(1)?).lt(200)),
    );
    add("below_7777", &["falsifiable"], u32s(0, 10_000), |t| {
        Ok(t.int()?.lt(7777))
    });
    add(
        "list_len_bound",
        &["containers"],
        list_of(u8_range(0, 255).expect("valid"), 0, 8).expect("valid"),
        |t| Ok(Bool::Lit(ints_of(t)?.len() <= 8)),
    );
    add(
        "list_sum_below_30",
        &["containers", "falsifiable"],
        list_of(u32s(0, 9), 0, 4).expect("valid"),
        |t| Ok(Bool::Lit(ints_of(t)?.iter().sum::<i128>() < 30)),
    );
    add(
        "pattern_length",
        &["pattern", "provable"],
        pattern("[a-c]{1,3}"),
        |t| {
            let n = string_of(t)?.chars().count();
            Ok(Bool::Lit((1..=3).contains(&n)))
        },
    );
    add(
        "pattern_no_bb",
        &["pattern", "falsifiable"],
        pattern("[ab]{0,4}"),
        |t| Ok(Bool::Lit(!string_of(t)?.contains("bb"))),
    );
    add(
        "pattern_identifier",
        &["pattern"],
        pattern("[a-z][a-z0-9_]{0,5}"),
        |t| {
            let s = string_of(t)?;
            Ok(Bool::Lit(
                s.chars().next().is_some_and(|c| c.is_ascii_lowercase()),
            ))
        },
    );
    add(
        "optional_bounded",
        &["containers", "provable"],
        optional_of(u32s(0, 10)),
        |t| {
            let x = match value_of(t)? {
                Value::Option(Some(x)) => x.as_int().unwrap_or(0),
                _ => 0,
            };
            Ok(Bool::Lit(x <= 10))
        },
    );
    add("bool_not_both", &["provable"], booleans(), |t| {
        let b = t.boolean()?;
        Ok(!(b.clone() & !b))
    });
    add(
        "even_halves",
        &["provable", "refined"],
        u32s(0, 1000).filter_carrier("even", |t| match t.int() {
            Ok(x) => (x % 2).equals(0),
            Err(f) => Bool::Fault(f),
        }),
        |t| {
            let x = t.int()?;
            Ok(((&x / 2) * 2).equals(x))
        },
    );
    add(
        "vacuous_refinement",
        &["refined"],
        u32s(0, 100).filter_carrier("above 200", |t| match t.int() {
            Ok(x) => x.gt(200),
            Err(f) => Bool::Fault(f),
        }),
        |t| Ok(t.int()?.equals(0)),
    );
    add(
        "odd_opaque_filter",
        &["provable", "refined"],
        filter(u32s(0, 999), "odd", |v| {
            v.as_int().is_some_and(|x| x % 2 == 1)
        }),
        |t| Ok((t.int()? % 2).equals(1)),
    );
    add(
        "max_branching",
        &["provable", "host-branch"],
        pair(u32s(0, 50), u32s(0, 50)),
        |t| {
            let (a, b) = (t.int_at(0)?, t.int_at(1)?);
            let m = if a.gt(&b).decide()? {
                a.clone()
            } else {
                b.clone()
            };
            Ok(m.ge(&a) & m.ge(b))
        },
    );
    add(
        "div_by_input",
        &["falsifiable"],
        pair(u32s(0, 100), u32s(0, 10)),
        |t| {
            let (a, b) = (t.int_at(0)?, t.int_at(1)?);
            Ok((&a / b).le(a))
        },
    );
    add(
        "map_keys_ascending",
        &["containers", "provable"],
        ordered_map_of(u8_range(0, 5).expect("valid"), booleans(), 0, 3).expect("valid"),
        |t| match value_of(t)? {
            Value::Map(m) => {
                let keys: Vec<_> = m.keys().collect();
                Ok(Bool::Lit(keys.windows(2).all(|w| w[0] < w[1])))
            }
            other => Err(Fault::Failed(format!("expected a map, found {other}"))),
        },
    );
    add(
        "one_of_gap",
        &["provable"],
        one_of(vec![u32s(0, 9), u32s(100, 109)]).expect("non-empty"),
        |t| Ok(t.int()?.not_equals(50)),
    );
    add(
        "sub_antisymmetric",
        &["provable"],
        pair(i32s(-50, 50), i32s(-50, 50)),
        |t| {
            let (a, b) = (t.int_at(0)?, t.int_at(1)?);
            Ok((&a - &b).equals(-(b - a)))
        },
    );
    add(
        "wide_product_gap",
        &["provable"],
        pair(
            u64_range(1, 1_000_000).expect("valid"),
            u64_range(1, 1_000_000).expect("valid"),
        ),
        |t| Ok((t.int_at(0)? * t.int_at(1)?).not_equals(Int::lit(999_999_999_999i64))),
    );
    add(
        "needle_filter",
        &["refined"],
        filter(u32s(0, 1_000_000), "needle", |v| v.as_int() == Some(7)),
        |t| Ok(t.int()?.equals(7)),
    );
    v
}

/// All corpus properties, in name order.
pub fn properties() -> Vec<Property> {
    let mut all = vec![multiply(), multiply_mutated()];
    all.extend(others());
    all.sort_by(|a, b| a.name().cmp(b.name()));
    all
}

pub fn registry() -> Registry {
    let mut r = Registry::new();
    for p in properties() {
        r.add(p).expect("corpus names are unique");
    }
    r
}

/// Patterns the string strategies are checked against.
pub const PATTERNS: [&str; 20] = [
    "[ab]{2}",
    "a|bc",
    "[a-c]{1,3}",
    "[ab]{0,4}",
    "[a-z][a-z0-9_]{0,5}",
    "(ab|cd)*",
    "x?y+z",
    "[^a-y]{3}",
    "[0-9]{2,4}",
    "[a-z]+@[a-z]+\\.com",
    "(a|b)(c|d)(e|f)",
    "[0-9a-f]{8}",
    "h(e|a)llo",
    "[ ]?[!-~]",
    ".{0,3}",
    "[A-Z]{1,2}-[0-9]{3}",
    "(x(y|z)?)+",
    "[.]+\\.",
    "(0|1){5}",
    "a{3}b{0,2}c?",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let r = registry();
        assert!(r.len() >= 20);
        assert!(r.get("multiply").is_some());
        for p in PATTERNS {
            assert!(pattern_strategy(p).is_ok(), "{p}");
        }
    }
}
