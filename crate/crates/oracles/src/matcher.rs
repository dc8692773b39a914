//! Backtracking matcher over the parsed pattern tree.

use std::collections::BTreeSet;

use propbridge_core::pattern::{Class, PatternAst};

const PRINTABLE: std::ops::RangeInclusive<char> = ' '..='~';

pub fn class_contains(c: &Class, ch: char) -> bool {
    let listed = c.ranges().iter().any(|&(lo, hi)| lo <= ch && ch <= hi);
    if c.negated() {
        PRINTABLE.contains(&ch) && !listed
    } else {
        listed
    }
}

/// Every position the pattern can end at when started at `pos`.
fn ends(ast: &PatternAst, s: &[char], pos: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    match ast {
        PatternAst::Literal(c) => {
            if s.get(pos) == Some(c) {
                out.insert(pos + 1);
            }
        }
        PatternAst::AnyChar => {
            if s.get(pos).is_some_and(|c| PRINTABLE.contains(c)) {
                out.insert(pos + 1);
            }
        }
        PatternAst::Class(class) => {
            if s.get(pos).is_some_and(|&c| class_contains(class, c)) {
                out.insert(pos + 1);
            }
        }
        PatternAst::Concat(parts) => {
            let mut here = BTreeSet::from([pos]);
            for p in parts {
                here = here.iter().flat_map(|&i| ends(p, s, i)).collect();
            }
            out = here;
        }
        PatternAst::Alternation(alts) => {
            for a in alts {
                out.extend(ends(a, s, pos));
            }
        }
        PatternAst::Repeat { inner, min, max } => {
            let mut here = BTreeSet::from([pos]);
            for k in 0..=*max {
                if k >= *min {
                    out.extend(here.iter().copied());
                }
                if k == *max || here.is_empty() {
                    break;
                }
                here = here.iter().flat_map(|&i| ends(inner, s, i)).collect();
            }
        }
    }
    out
}

/// Does `ast` match the whole of `s`?
pub fn full_match(ast: &PatternAst, s: &str) -> bool {
    let chars: Vec<char> = s.chars().collect();
    ends(ast, &chars, 0).contains(&chars.len())
}
