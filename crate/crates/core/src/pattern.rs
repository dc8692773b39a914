//! A bounded regular-expression subset as a string strategy.
//!
//! Supported: literals, the escapes `\\ \. \[ \] \( \) \| \{ \} \* \+ \?`,
//! `.`, classes `[a-z]` and `[^...]`, grouping, alternation, and the
//! quantifiers `?`, `*`, `+`, `{m}`, `{m,n}`. `*` and `+` are bounded by a
//! repetition cap (default 8). `.` and negated classes draw from printable
//! ASCII (0x20..=0x7E). Anchors, backreferences and lookaround are rejected.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::strategy::{self, just, tuple_of, u32_range, Node, Strategy};
use crate::value::Value;

pub const DEFAULT_REPETITION_CAP: u32 = 8;
/// Explicit `{m,n}` counts above this are refused.
pub const MAX_EXPLICIT_REPEAT: u32 = 1000;

const PRINTABLE: (char, char) = (' ', '~');

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class {
    /// Sorted, disjoint, non-adjacent ranges.
    ranges: Vec<(char, char)>,
    negated: bool,
}

impl Class {
    pub fn new(ranges: Vec<(char, char)>, negated: bool) -> Self {
        Class {
            ranges: normalize(ranges),
            negated,
        }
    }

    pub fn ranges(&self) -> &[(char, char)] {
        &self.ranges
    }

    pub fn negated(&self) -> bool {
        self.negated
    }

    /// Effective member ranges, with negation resolved against printable
    /// ASCII.
    pub fn members(&self) -> Vec<(char, char)> {
        if !self.negated {
            return self.ranges.clone();
        }
        let mut out = Vec::new();
        let mut next = PRINTABLE.0 as u32;
        let end = PRINTABLE.1 as u32;
        for &(lo, hi) in &self.ranges {
            let (lo, hi) = (lo as u32, hi as u32);
            if hi < next || lo > end {
                continue;
            }
            if lo > next {
                out.push((char_of(next), char_of(lo - 1)));
            }
            next = next.max(hi + 1);
        }
        if next <= end {
            out.push((char_of(next), char_of(end)));
        }
        out
    }

    pub fn size(&self) -> u64 {
        self.members()
            .iter()
            .map(|&(lo, hi)| (hi as u64) - (lo as u64) + 1)
            .sum()
    }

    pub fn contains(&self, c: char) -> bool {
        self.members().iter().any(|&(lo, hi)| lo <= c && c <= hi)
    }

    /// Member number `i` in ascending code point order.
    fn nth(members: &[(char, char)], mut i: u64) -> char {
        for &(lo, hi) in members {
            let span = (hi as u64) - (lo as u64) + 1;
            if i < span {
                return char_of(lo as u32 + i as u32);
            }
            i -= span;
        }
        unreachable!("class index out of range")
    }
}

fn char_of(c: u32) -> char {
    char::from_u32(c).unwrap_or('\u{FFFD}')
}

fn normalize(mut ranges: Vec<(char, char)>) -> Vec<(char, char)> {
    ranges.sort();
    let mut out: Vec<(char, char)> = Vec::with_capacity(ranges.len());
    for (lo, hi) in ranges {
        if let Some(last) = out.last_mut() {
            if (lo as u32) <= (last.1 as u32).saturating_add(1) {
                if hi > last.1 {
                    last.1 = hi;
                }
                continue;
            }
        }
        out.push((lo, hi));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternAst {
    Literal(char),
    AnyChar,
    Class(Class),
    Concat(Vec<PatternAst>),
    Alternation(Vec<PatternAst>),
    Repeat {
        inner: alloc::boxed::Box<PatternAst>,
        min: u32,
        max: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnclosedGroup,
    UnmatchedParen,
    UnclosedClass,
    EmptyClass,
    InvalidRange,
    InvalidRepetition,
    NothingToRepeat,
    TrailingEscape,
    UnknownEscape(char),
    Unsupported(&'static str),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnclosedGroup => f.write_str("unclosed group"),
            ParseErrorKind::UnmatchedParen => f.write_str("unmatched ')'"),
            ParseErrorKind::UnclosedClass => f.write_str("unclosed character class"),
            ParseErrorKind::EmptyClass => f.write_str("character class matches nothing"),
            ParseErrorKind::InvalidRange => f.write_str("class range out of order"),
            ParseErrorKind::InvalidRepetition => f.write_str("malformed repetition"),
            ParseErrorKind::NothingToRepeat => f.write_str("quantifier has nothing to repeat"),
            ParseErrorKind::TrailingEscape => f.write_str("trailing backslash"),
            ParseErrorKind::UnknownEscape(c) => write!(f, "unsupported escape \\{c}"),
            ParseErrorKind::Unsupported(what) => write!(f, "unsupported construct: {what}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("pattern error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    cap: u32,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn err<T>(&self, offset: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { offset, kind })
    }

    fn alternation(&mut self) -> Result<PatternAst, ParseError> {
        let mut branches = alloc::vec![self.concat()?];
        while self.peek() == Some('|') {
            self.bump();
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            PatternAst::Alternation(branches)
        })
    }

    fn concat(&mut self) -> Result<PatternAst, ParseError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            items.push(self.repeat()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            PatternAst::Concat(items)
        })
    }

    fn repeat(&mut self) -> Result<PatternAst, ParseError> {
        let atom = self.atom()?;
        let (min, max) = match self.peek() {
            Some('?') => (0, 1),
            Some('*') => (0, self.cap),
            Some('+') => (1, self.cap.max(1)),
            Some('{') => return self.braces(atom),
            _ => return Ok(atom),
        };
        self.bump();
        self.reject_stacked()?;
        Ok(PatternAst::Repeat {
            inner: alloc::boxed::Box::new(atom),
            min,
            max,
        })
    }

    fn reject_stacked(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some('?' | '*' | '+' | '{') => {
                self.err(self.pos, ParseErrorKind::Unsupported("stacked quantifiers"))
            }
            _ => Ok(()),
        }
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some('0'..='9')) {
            self.bump();
        }
        self.src[start..self.pos].parse().ok()
    }

    fn braces(&mut self, atom: PatternAst) -> Result<PatternAst, ParseError> {
        let open = self.pos;
        self.bump();
        let bad = ParseErrorKind::InvalidRepetition;
        let Some(min) = self.number() else {
            return self.err(open, bad);
        };
        let max = match self.bump() {
            Some('}') => min,
            Some(',') => {
                let Some(max) = self.number() else {
                    return self.err(open, bad);
                };
                if self.bump() != Some('}') {
                    return self.err(open, bad);
                }
                max
            }
            _ => return self.err(open, bad),
        };
        if min > max || max > MAX_EXPLICIT_REPEAT {
            return self.err(open, bad);
        }
        self.reject_stacked()?;
        Ok(PatternAst::Repeat {
            inner: alloc::boxed::Box::new(atom),
            min,
            max,
        })
    }

    fn escape(&mut self, at: usize) -> Result<char, ParseError> {
        match self.bump() {
            None => self.err(at, ParseErrorKind::TrailingEscape),
            Some(c @ ('\\' | '.' | '[' | ']' | '(' | ')' | '|' | '{' | '}' | '*' | '+' | '?')) => {
                Ok(c)
            }
            Some('-') => Ok('-'),
            Some('1'..='9') => self.err(at, ParseErrorKind::Unsupported("backreference")),
            Some('b' | 'B' | 'A' | 'z' | 'Z') => {
                self.err(at, ParseErrorKind::Unsupported("anchor"))
            }
            Some(c) => self.err(at, ParseErrorKind::UnknownEscape(c)),
        }
    }

    fn atom(&mut self) -> Result<PatternAst, ParseError> {
        let at = self.pos;
        match self.bump().expect("caller checked for input") {
            '(' => {
                if self.peek() == Some('?') {
                    return self.err(at, ParseErrorKind::Unsupported("lookaround or group flags"));
                }
                let inner = self.alternation()?;
                if self.bump() != Some(')') {
                    return self.err(at, ParseErrorKind::UnclosedGroup);
                }
                Ok(inner)
            }
            ')' => self.err(at, ParseErrorKind::UnmatchedParen),
            '[' => self.class(at),
            ']' => self.err(at, ParseErrorKind::UnmatchedParen),
            '.' => Ok(PatternAst::AnyChar),
            '^' | '$' => self.err(at, ParseErrorKind::Unsupported("anchor")),
            '?' | '*' | '+' | '{' => self.err(at, ParseErrorKind::NothingToRepeat),
            '}' => self.err(at, ParseErrorKind::InvalidRepetition),
            '\\' => Ok(PatternAst::Literal(self.escape(at)?)),
            c => Ok(PatternAst::Literal(c)),
        }
    }

    fn class_char(&mut self, open: usize) -> Result<char, ParseError> {
        let at = self.pos;
        match self.bump() {
            None => self.err(open, ParseErrorKind::UnclosedClass),
            Some('\\') => {
                if self.peek().is_none() {
                    return self.err(open, ParseErrorKind::UnclosedClass);
                }
                self.escape(at)
            }
            Some(c) => Ok(c),
        }
    }

    fn class(&mut self, open: usize) -> Result<PatternAst, ParseError> {
        let negated = if self.peek() == Some('^') {
            self.bump();
            true
        } else {
            false
        };
        let mut ranges = Vec::new();
        loop {
            match self.peek() {
                None => return self.err(open, ParseErrorKind::UnclosedClass),
                Some(']') => {
                    self.bump();
                    break;
                }
                Some('[') => {
                    return self.err(self.pos, ParseErrorKind::Unsupported("nested class"))
                }
                _ => {}
            }
            let item_at = self.pos;
            let lo = self.class_char(open)?;
            let is_range = self.peek() == Some('-')
                && self.src[self.pos + 1..]
                    .chars()
                    .next()
                    .is_some_and(|c| c != ']');
            if is_range {
                self.bump();
                let hi = self.class_char(open)?;
                if lo > hi {
                    return self.err(item_at, ParseErrorKind::InvalidRange);
                }
                ranges.push((lo, hi));
            } else {
                ranges.push((lo, lo));
            }
        }
        let class = Class::new(ranges, negated);
        if class.size() == 0 {
            return self.err(open, ParseErrorKind::EmptyClass);
        }
        Ok(PatternAst::Class(class))
    }
}

/// Parse with the default repetition cap.
pub fn parse_pattern(pattern: &str) -> Result<PatternAst, ParseError> {
    parse_pattern_with_cap(pattern, DEFAULT_REPETITION_CAP)
}

/// Parse, rewriting `*` to `{0,cap}` and `+` to `{1,cap}`.
pub fn parse_pattern_with_cap(pattern: &str, cap: u32) -> Result<PatternAst, ParseError> {
    let mut p = Parser {
        src: pattern,
        pos: 0,
        cap,
    };
    let ast = p.alternation()?;
    if p.pos < pattern.len() {
        // Only an unmatched ')' stops the top-level alternation early.
        return p.err(p.pos, ParseErrorKind::UnmatchedParen);
    }
    Ok(ast)
}

fn concat_strings(v: Value) -> Value {
    let mut out = String::new();
    let parts = match v {
        Value::Tuple(items) | Value::List(items) => items,
        other => alloc::vec![other],
    };
    for p in parts {
        if let Value::Str(s) = p {
            out.push_str(&s);
        }
    }
    Value::Str(out)
}

fn lower(ast: &PatternAst) -> Strategy {
    match ast {
        PatternAst::Literal(c) => just(Value::Str((*c).into())),
        PatternAst::AnyChar => lower(&PatternAst::Class(Class::new(
            alloc::vec![PRINTABLE],
            false,
        ))),
        PatternAst::Class(class) => {
            let members = class.members();
            let size = class.size();
            if size == 1 {
                return just(Value::Str(members[0].0.into()));
            }
            let index = u32_range(0, (size - 1) as u32).expect("class size fits in u32");
            strategy::map(index, move |v| {
                let i = v.as_int().expect("index strategy yields ints") as u64;
                Value::Str(Class::nth(&members, i).into())
            })
        }
        PatternAst::Concat(items) => {
            strategy::map(tuple_of(items.iter().map(lower).collect()), concat_strings)
        }
        PatternAst::Alternation(branches) => strategy::one_of(branches.iter().map(lower).collect())
            .expect("parser never yields empty alternation"),
        PatternAst::Repeat { inner, min, max } => strategy::map(
            strategy::list_of(lower(inner), *min as usize, *max as usize)
                .expect("parser checks min <= max"),
            concat_strings,
        ),
    }
}

/// Strategy over the strings of `pattern`, with the default repetition cap.
pub fn pattern_strategy(pattern: &str) -> Result<Strategy, ParseError> {
    pattern_strategy_with_cap(pattern, DEFAULT_REPETITION_CAP)
}

pub fn pattern_strategy_with_cap(pattern: &str, cap: u32) -> Result<Strategy, ParseError> {
    let ast = parse_pattern_with_cap(pattern, cap)?;
    Ok(Strategy::from_node(Node::Pattern {
        source: pattern.into(),
        cap,
        inner: lower(&ast),
    }))
}
