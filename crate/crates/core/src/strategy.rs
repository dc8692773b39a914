//! The strategy DSL: immutable descriptions of value domains.
//!
//! A strategy is never run directly. Backends interpret it three ways: as a
//! random generator with shrinking ([`crate::tree`]), as a canonical ordered
//! stream ([`crate::enumerate`]), or as symbolic variables over interval
//! boxes ([`crate::symbolize`]).

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::carrier::{Bool, Term};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Width {
    W8,
    W16,
    W32,
    W64,
}

impl Width {
    pub fn bits(self) -> u32 {
        match self {
            Width::W8 => 8,
            Width::W16 => 16,
            Width::W32 => 32,
            Width::W64 => 64,
        }
    }

    /// Representable `(min, max)` for this width.
    pub fn bounds(self, signed: bool) -> (i128, i128) {
        let bits = self.bits();
        if signed {
            (-(1i128 << (bits - 1)), (1i128 << (bits - 1)) - 1)
        } else {
            (0, (1i128 << bits) - 1)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("empty range: {lo} > {hi}")]
    EmptyRange { lo: i128, hi: i128 },
    #[error("bound {value} does not fit in {}{}", if *signed { "i" } else { "u" }, width.bits())]
    BoundOverflow {
        value: i128,
        width: Width,
        signed: bool,
    },
    #[error("one_of needs at least one alternative")]
    EmptyChoice,
    #[error("empty size range: min {min} > max {max}")]
    EmptySize { min: usize, max: usize },
}

/// Failures while interpreting a strategy.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("filter `{label}` rejected too many values")]
    RejectionExhausted { label: String },
    #[error("strategy domain is too large to enumerate without a budget")]
    NotEnumerable,
    #[error("transform failed: {0}")]
    Transform(String),
}

pub type Transform = Arc<dyn Fn(Value) -> Value + Send + Sync>;
pub type CarrierTransform = Arc<dyn Fn(&Term) -> Term + Send + Sync>;
pub type Guard = Arc<dyn Fn(&Value) -> bool + Send + Sync>;
pub type CarrierGuard = Arc<dyn Fn(&Term) -> Bool + Send + Sync>;

#[derive(Clone)]
pub enum MapFn {
    Opaque(Transform),
    Carrier(CarrierTransform),
}

impl MapFn {
    pub fn apply(&self, v: Value) -> Result<Value, StrategyError> {
        match self {
            MapFn::Opaque(f) => Ok(f(v)),
            MapFn::Carrier(f) => f(&Term::from_value(&v))
                .to_value()
                .map_err(|e| StrategyError::Transform(e.to_string())),
        }
    }
}

#[derive(Clone)]
pub enum FilterFn {
    Opaque(Guard),
    Carrier(CarrierGuard),
}

impl FilterFn {
    /// A carrier guard that faults on a value rejects it.
    pub fn accepts(&self, v: &Value) -> bool {
        match self {
            FilterFn::Opaque(f) => f(v),
            FilterFn::Carrier(f) => matches!(f(&Term::from_value(v)).decide(), Ok(true)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub lo: i128,
    pub hi: i128,
    pub width: Width,
    pub signed: bool,
}

#[derive(Clone)]
pub(crate) enum Node {
    Just(Value),
    IntRange(IntRange),
    Map {
        inner: Strategy,
        f: MapFn,
    },
    Filter {
        inner: Strategy,
        label: String,
        pred: FilterFn,
    },
    OneOf(Vec<Strategy>),
    TupleOf(Vec<Strategy>),
    OptionalOf(Strategy),
    ListOf {
        inner: Strategy,
        min: usize,
        max: usize,
    },
    OrderedMapOf {
        keys: Strategy,
        values: Strategy,
        min: usize,
        max: usize,
    },
    /// String pattern. `inner` is the desugared composition that does the
    /// actual work; `source` is kept so the repetition cap can be changed.
    Pattern {
        source: String,
        cap: u32,
        inner: Strategy,
    },
}

/// Immutable, cheaply clonable strategy handle; shareable across threads.
#[derive(Clone)]
pub struct Strategy(pub(crate) Arc<Node>);

impl Strategy {
    pub(crate) fn from_node(node: Node) -> Self {
        Strategy(Arc::new(node))
    }

    pub(crate) fn node(&self) -> &Node {
        &self.0
    }

    pub fn map(self, f: impl Fn(Value) -> Value + Send + Sync + 'static) -> Strategy {
        map(self, f)
    }

    pub fn map_carrier(self, f: impl Fn(&Term) -> Term + Send + Sync + 'static) -> Strategy {
        map_carrier(self, f)
    }

    pub fn filter(
        self,
        label: impl Into<String>,
        pred: impl Fn(&Value) -> bool + Send + Sync + 'static,
    ) -> Strategy {
        filter(self, label, pred)
    }

    pub fn filter_carrier(
        self,
        label: impl Into<String>,
        pred: impl Fn(&Term) -> Bool + Send + Sync + 'static,
    ) -> Strategy {
        filter_carrier(self, label, pred)
    }

    /// Whether any filter appears in the strategy.
    pub fn has_filter(&self) -> bool {
        match self.node() {
            Node::Just(_) | Node::IntRange(_) => false,
            Node::Filter { .. } => true,
            Node::Map { inner, .. } | Node::OptionalOf(inner) | Node::ListOf { inner, .. } => {
                inner.has_filter()
            }
            Node::Pattern { inner, .. } => inner.has_filter(),
            Node::OneOf(items) | Node::TupleOf(items) => items.iter().any(Strategy::has_filter),
            Node::OrderedMapOf { keys, values, .. } => keys.has_filter() || values.has_filter(),
        }
    }

    /// Rebuild every string pattern with repetition cap `cap`.
    pub fn with_repetition_cap(&self, cap: u32) -> Strategy {
        let node = match self.node() {
            Node::Just(_) | Node::IntRange(_) => return self.clone(),
            Node::Pattern {
                source, cap: old, ..
            } => {
                if *old == cap {
                    return self.clone();
                }
                return crate::pattern::pattern_strategy_with_cap(source, cap)
                    .expect("pattern parsed once already");
            }
            Node::Map { inner, f } => Node::Map {
                inner: inner.with_repetition_cap(cap),
                f: f.clone(),
            },
            Node::Filter { inner, label, pred } => Node::Filter {
                inner: inner.with_repetition_cap(cap),
                label: label.clone(),
                pred: pred.clone(),
            },
            Node::OneOf(items) => {
                Node::OneOf(items.iter().map(|s| s.with_repetition_cap(cap)).collect())
            }
            Node::TupleOf(items) => {
                Node::TupleOf(items.iter().map(|s| s.with_repetition_cap(cap)).collect())
            }
            Node::OptionalOf(inner) => Node::OptionalOf(inner.with_repetition_cap(cap)),
            Node::ListOf { inner, min, max } => Node::ListOf {
                inner: inner.with_repetition_cap(cap),
                min: *min,
                max: *max,
            },
            Node::OrderedMapOf {
                keys,
                values,
                min,
                max,
            } => Node::OrderedMapOf {
                keys: keys.with_repetition_cap(cap),
                values: values.with_repetition_cap(cap),
                min: *min,
                max: *max,
            },
        };
        Strategy::from_node(node)
    }
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Just(v) => write!(f, "just({v})"),
            Node::IntRange(r) => write!(
                f,
                "int_range({}, {}, {}{})",
                r.lo,
                r.hi,
                if r.signed { "i" } else { "u" },
                r.width.bits()
            ),
            Node::Map { inner, .. } => write!(f, "map({inner:?})"),
            Node::Filter { inner, label, .. } => write!(f, "filter({inner:?}, {label:?})"),
            Node::OneOf(items) => f.debug_tuple("one_of").field(items).finish(),
            Node::TupleOf(items) => f.debug_tuple("tuple_of").field(items).finish(),
            Node::OptionalOf(inner) => write!(f, "optional_of({inner:?})"),
            Node::ListOf { inner, min, max } => write!(f, "list_of({inner:?}, {min}, {max})"),
            Node::OrderedMapOf {
                keys,
                values,
                min,
                max,
            } => write!(f, "ordered_map_of({keys:?}, {values:?}, {min}, {max})"),
            Node::Pattern { source, .. } => write!(f, "pattern({source:?})"),
        }
    }
}

/// Read-only view of a strategy's top constructor, for tools that walk
/// the structure themselves.
#[derive(Clone, Copy)]
pub enum StrategyView<'a> {
    Just(&'a Value),
    IntRange(IntRange),
    Map(&'a Strategy, &'a MapFn),
    Filter(&'a Strategy, &'a str, &'a FilterFn),
    OneOf(&'a [Strategy]),
    TupleOf(&'a [Strategy]),
    OptionalOf(&'a Strategy),
    ListOf(&'a Strategy, usize, usize),
    OrderedMapOf(&'a Strategy, &'a Strategy, usize, usize),
    /// Source text, repetition cap, and the desugared strategy.
    Pattern(&'a str, u32, &'a Strategy),
}

impl Strategy {
    pub fn view(&self) -> StrategyView<'_> {
        match self.node() {
            Node::Just(v) => StrategyView::Just(v),
            Node::IntRange(r) => StrategyView::IntRange(*r),
            Node::Map { inner, f } => StrategyView::Map(inner, f),
            Node::Filter { inner, label, pred } => StrategyView::Filter(inner, label, pred),
            Node::OneOf(items) => StrategyView::OneOf(items),
            Node::TupleOf(items) => StrategyView::TupleOf(items),
            Node::OptionalOf(inner) => StrategyView::OptionalOf(inner),
            Node::ListOf { inner, min, max } => StrategyView::ListOf(inner, *min, *max),
            Node::OrderedMapOf {
                keys,
                values,
                min,
                max,
            } => StrategyView::OrderedMapOf(keys, values, *min, *max),
            Node::Pattern { source, cap, inner } => StrategyView::Pattern(source, *cap, inner),
        }
    }
}

pub fn just(v: impl Into<Value>) -> Strategy {
    Strategy::from_node(Node::Just(v.into()))
}

pub fn int_range(
    lo: i128,
    hi: i128,
    width: Width,
    signed: bool,
) -> Result<Strategy, ConstructionError> {
    let (min, max) = width.bounds(signed);
    for value in [lo, hi] {
        if value < min || value > max {
            return Err(ConstructionError::BoundOverflow {
                value,
                width,
                signed,
            });
        }
    }
    if lo > hi {
        return Err(ConstructionError::EmptyRange { lo, hi });
    }
    Ok(Strategy::from_node(Node::IntRange(IntRange {
        lo,
        hi,
        width,
        signed,
    })))
}

/// `lo..=hi` over `u32`, the form of the classic two-parameter harness.
pub fn u32_range(lo: u32, hi: u32) -> Result<Strategy, ConstructionError> {
    int_range(lo.into(), hi.into(), Width::W32, false)
}

pub fn i32_range(lo: i32, hi: i32) -> Result<Strategy, ConstructionError> {
    int_range(lo.into(), hi.into(), Width::W32, true)
}

pub fn u64_range(lo: u64, hi: u64) -> Result<Strategy, ConstructionError> {
    int_range(lo.into(), hi.into(), Width::W64, false)
}

pub fn i64_range(lo: i64, hi: i64) -> Result<Strategy, ConstructionError> {
    int_range(lo.into(), hi.into(), Width::W64, true)
}

pub fn u8_range(lo: u8, hi: u8) -> Result<Strategy, ConstructionError> {
    int_range(lo.into(), hi.into(), Width::W8, false)
}

/// Opaque transform; the symbolic backend cannot see through it.
pub fn map(s: Strategy, f: impl Fn(Value) -> Value + Send + Sync + 'static) -> Strategy {
    Strategy::from_node(Node::Map {
        inner: s,
        f: MapFn::Opaque(Arc::new(f)),
    })
}

/// Transform written against the carrier, usable by every backend.
pub fn map_carrier(s: Strategy, f: impl Fn(&Term) -> Term + Send + Sync + 'static) -> Strategy {
    Strategy::from_node(Node::Map {
        inner: s,
        f: MapFn::Carrier(Arc::new(f)),
    })
}

pub fn filter(
    s: Strategy,
    label: impl Into<String>,
    pred: impl Fn(&Value) -> bool + Send + Sync + 'static,
) -> Strategy {
    Strategy::from_node(Node::Filter {
        inner: s,
        label: label.into(),
        pred: FilterFn::Opaque(Arc::new(pred)),
    })
}

/// Filter written against the carrier; the symbolic backend treats it as a
/// hypothesis.
pub fn filter_carrier(
    s: Strategy,
    label: impl Into<String>,
    pred: impl Fn(&Term) -> Bool + Send + Sync + 'static,
) -> Strategy {
    Strategy::from_node(Node::Filter {
        inner: s,
        label: label.into(),
        pred: FilterFn::Carrier(Arc::new(pred)),
    })
}

pub fn one_of(alternatives: Vec<Strategy>) -> Result<Strategy, ConstructionError> {
    if alternatives.is_empty() {
        return Err(ConstructionError::EmptyChoice);
    }
    Ok(Strategy::from_node(Node::OneOf(alternatives)))
}

pub fn tuple_of(components: Vec<Strategy>) -> Strategy {
    Strategy::from_node(Node::TupleOf(components))
}

pub fn optional_of(s: Strategy) -> Strategy {
    Strategy::from_node(Node::OptionalOf(s))
}

pub fn list_of(s: Strategy, min: usize, max: usize) -> Result<Strategy, ConstructionError> {
    if min > max {
        return Err(ConstructionError::EmptySize { min, max });
    }
    Ok(Strategy::from_node(Node::ListOf { inner: s, min, max }))
}

pub fn ordered_map_of(
    keys: Strategy,
    values: Strategy,
    min: usize,
    max: usize,
) -> Result<Strategy, ConstructionError> {
    if min > max {
        return Err(ConstructionError::EmptySize { min, max });
    }
    Ok(Strategy::from_node(Node::OrderedMapOf {
        keys,
        values,
        min,
        max,
    }))
}

/// `one_of(just(false), just(true))`.
pub fn booleans() -> Strategy {
    Strategy::from_node(Node::OneOf(alloc::vec![just(false), just(true)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cardinality {
    /// Exact for filter-free strategies; an upper bound once a map is involved.
    Finite(u64),
    TooLarge,
    Unknown,
}

const CARDINALITY_LIMIT: u128 = 1 << 63;

impl Cardinality {
    fn from_count(n: u128) -> Self {
        if n > CARDINALITY_LIMIT {
            Cardinality::TooLarge
        } else {
            Cardinality::Finite(n as u64)
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Cardinality::Finite(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::TooLarge => f.write_str("too large"),
            Cardinality::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Clone, Copy)]
enum Count {
    N(u128),
    Big,
    Unknown,
}

impl Count {
    fn of(n: u128) -> Count {
        if n > CARDINALITY_LIMIT {
            Count::Big
        } else {
            Count::N(n)
        }
    }
}

fn sum(a: Count, b: Count) -> Count {
    match (a, b) {
        (Count::Unknown, _) | (_, Count::Unknown) => Count::Unknown,
        (Count::Big, _) | (_, Count::Big) => Count::Big,
        (Count::N(x), Count::N(y)) => Count::of(x + y),
    }
}

fn product(a: Count, b: Count) -> Count {
    match (a, b) {
        (Count::Unknown, _) | (_, Count::Unknown) => Count::Unknown,
        // Only ordered maps with too few keys have empty domains.
        (Count::N(0), _) | (_, Count::N(0)) => Count::N(0),
        (Count::Big, _) | (_, Count::Big) => Count::Big,
        (Count::N(x), Count::N(y)) => x.checked_mul(y).map_or(Count::Big, Count::of),
    }
}

fn power(base: Count, exp: usize) -> Count {
    let mut acc = Count::N(1);
    for _ in 0..exp {
        acc = product(acc, base);
        if matches!(acc, Count::Big | Count::Unknown) {
            break;
        }
    }
    acc
}

fn binomial(n: u128, k: usize) -> Count {
    let k = k as u128;
    if k > n {
        return Count::N(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return Count::Big,
        };
        if acc > CARDINALITY_LIMIT {
            return Count::Big;
        }
    }
    Count::N(acc)
}

fn count(s: &Strategy, see_through_filters: bool) -> Count {
    match s.node() {
        Node::Just(_) => Count::N(1),
        Node::IntRange(r) => Count::of((r.hi - r.lo) as u128 + 1),
        Node::Map { inner, .. } => count(inner, see_through_filters),
        Node::Pattern { inner, .. } => count(inner, see_through_filters),
        Node::Filter { inner, .. } => {
            if see_through_filters {
                count(inner, true)
            } else {
                Count::Unknown
            }
        }
        Node::OneOf(items) => items.iter().fold(Count::N(0), |acc, s| {
            sum(acc, count(s, see_through_filters))
        }),
        Node::TupleOf(items) => items.iter().fold(Count::N(1), |acc, s| {
            product(acc, count(s, see_through_filters))
        }),
        Node::OptionalOf(inner) => sum(Count::N(1), count(inner, see_through_filters)),
        Node::ListOf { inner, min, max } => {
            let n = count(inner, see_through_filters);
            let mut acc = Count::N(0);
            for len in *min..=*max {
                acc = sum(acc, power(n, len));
                if matches!(acc, Count::Big | Count::Unknown) {
                    break;
                }
            }
            acc
        }
        Node::OrderedMapOf {
            keys,
            values,
            min,
            max,
        } => {
            let k = count(keys, see_through_filters);
            let v = count(values, see_through_filters);
            let Count::N(key_count) = k else {
                return match (k, v) {
                    (Count::Unknown, _) | (_, Count::Unknown) => Count::Unknown,
                    _ => Count::Big,
                };
            };
            let mut acc = Count::N(0);
            for size in *min..=*max {
                if size as u128 > key_count {
                    break;
                }
                acc = sum(acc, product(binomial(key_count, size), power(v, size)));
                if matches!(acc, Count::Big | Count::Unknown) {
                    break;
                }
            }
            acc
        }
    }
}

fn to_cardinality(c: Count) -> Cardinality {
    match c {
        Count::N(n) => Cardinality::from_count(n),
        Count::Big => Cardinality::TooLarge,
        Count::Unknown => Cardinality::Unknown,
    }
}

/// Number of values in the domain.
///
/// Exact for filter-free strategies, an upper bound when maps may collapse
/// values, `Unknown` whenever a filter is present.
pub fn cardinality(s: &Strategy) -> Cardinality {
    to_cardinality(count(s, false))
}

/// Cardinality with every filter treated as accepting everything: the size of
/// the base domain a filtered enumeration has to traverse.
pub fn base_cardinality(s: &Strategy) -> Cardinality {
    to_cardinality(count(s, true))
}
