//! Brute-force domain listing by walking the strategy structure.

use std::collections::BTreeMap;

use propbridge_core::pattern::{parse_pattern_with_cap, PatternAst};
use propbridge_core::{Strategy, StrategyView, Value};

use crate::matcher::class_contains;

fn product(parts: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut rows = vec![Vec::new()];
    for part in parts {
        let mut next = Vec::new();
        for row in &rows {
            for v in part {
                let mut r = row.clone();
                r.push(v.clone());
                next.push(r);
            }
        }
        rows = next;
    }
    rows
}

fn subsets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut with: Vec<Vec<T>> = subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0].clone());
            s
        })
        .collect();
    with.extend(subsets(&items[1..], k));
    with
}

/// Every value of `s`, with multiplicity. Exponential; keep domains small.
pub fn values(s: &Strategy) -> Vec<Value> {
    match s.view() {
        StrategyView::Just(v) => vec![v.clone()],
        StrategyView::IntRange(r) => (r.lo..=r.hi).map(Value::Int).collect(),
        StrategyView::Map(inner, f) => values(inner)
            .into_iter()
            .map(|v| f.apply(v).expect("oracle maps do not fail"))
            .collect(),
        StrategyView::Filter(inner, _, pred) => values(inner)
            .into_iter()
            .filter(|v| pred.accepts(v))
            .collect(),
        StrategyView::OneOf(alts) => alts.iter().flat_map(values).collect(),
        StrategyView::TupleOf(items) => {
            let parts: Vec<_> = items.iter().map(values).collect();
            product(&parts).into_iter().map(Value::Tuple).collect()
        }
        StrategyView::OptionalOf(inner) => std::iter::once(Value::Option(None))
            .chain(
                values(inner)
                    .into_iter()
                    .map(|v| Value::Option(Some(Box::new(v)))),
            )
            .collect(),
        StrategyView::ListOf(inner, min, max) => {
            let elems = values(inner);
            (min..=max)
                .flat_map(|n| product(&vec![elems.clone(); n]))
                .map(Value::List)
                .collect()
        }
        StrategyView::OrderedMapOf(keys, vals, min, max) => {
            let mut ks = values(keys);
            ks.sort();
            ks.dedup();
            let vs = values(vals);
            let mut out = Vec::new();
            for n in min..=max {
                for chosen in subsets(&ks, n) {
                    for assignment in product(&vec![vs.clone(); n]) {
                        let m: BTreeMap<Value, Value> =
                            chosen.iter().cloned().zip(assignment).collect();
                        out.push(Value::Map(m));
                    }
                }
            }
            out
        }
        StrategyView::Pattern(src, cap, _) => {
            let ast = parse_pattern_with_cap(src, cap).expect("pattern parsed once already");
            language(&ast).into_iter().map(Value::Str).collect()
        }
    }
}

/// Every string the pattern tree denotes, with one copy per derivation.
pub fn language(ast: &PatternAst) -> Vec<String> {
    match ast {
        PatternAst::Literal(c) => vec![c.to_string()],
        PatternAst::AnyChar => (' '..='~').map(String::from).collect(),
        PatternAst::Class(class) => (' '..='~')
            .chain(
                (0u32..0x3000)
                    .filter_map(char::from_u32)
                    .filter(|c| !(' '..='~').contains(c)),
            )
            .filter(|&c| class_contains(class, c))
            .map(String::from)
            .collect(),
        PatternAst::Concat(parts) => {
            let mut acc = vec![String::new()];
            for p in parts {
                let tails = language(p);
                acc = acc
                    .iter()
                    .flat_map(|h| tails.iter().map(move |t| format!("{h}{t}")))
                    .collect();
            }
            acc
        }
        PatternAst::Alternation(alts) => alts.iter().flat_map(language).collect(),
        PatternAst::Repeat { inner, min, max } => {
            let one = language(inner);
            let mut out = Vec::new();
            let mut layer = vec![String::new()];
            for k in 0..=*max {
                if k >= *min {
                    out.extend(layer.iter().cloned());
                }
                if k < *max {
                    layer = layer
                        .iter()
                        .flat_map(|h| one.iter().map(move |t| format!("{h}{t}")))
                        .collect();
                }
            }
            out
        }
    }
}
