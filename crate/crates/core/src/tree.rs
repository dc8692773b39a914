//! Random generation and shrinking.
//!
//! A [`ValueTree`] is a concrete value plus enough structure to list simpler
//! candidates. Candidates are produced simplest-first and each one has a
//! strictly smaller [`ValueTree::complexity`], so greedy shrinking always
//! terminates.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::enumerate;
use crate::rng::PrngState;
use crate::strategy::{FilterFn, MapFn, Node, Strategy, StrategyError};
use crate::value::Value;

/// Rejections a single filtered draw may accumulate before giving up.
pub const REJECTIONS_PER_VALUE: u64 = 100;

/// Generation state for one run: the PRNG plus run-wide rejection accounting.
#[derive(Clone, Debug)]
pub struct Gen {
    rng: PrngState,
    rejections: u64,
    rejection_limit: u64,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: PrngState::new(seed),
            rejections: 0,
            rejection_limit: u64::MAX,
        }
    }

    /// Generation budget for a run of `cases` draws: at most ten rejections
    /// per case across the whole run.
    pub fn for_run(seed: u64, cases: u64) -> Self {
        Gen {
            rejection_limit: cases.saturating_mul(10),
            ..Gen::new(seed)
        }
    }

    pub fn rng(&mut self) -> &mut PrngState {
        &mut self.rng
    }

    pub fn rejections(&self) -> u64 {
        self.rejections
    }

    fn reject(&mut self, label: &str) -> Result<(), StrategyError> {
        self.rejections += 1;
        if self.rejections > self.rejection_limit {
            return Err(StrategyError::RejectionExhausted {
                label: label.into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone)]
enum Shape {
    Leaf,
    Int {
        lo: i128,
    },
    Mapped {
        inner: Box<ValueTree>,
        f: MapFn,
    },
    Filtered {
        inner: Box<ValueTree>,
        pred: FilterFn,
    },
    Choice {
        index: usize,
        inner: Box<ValueTree>,
        alternatives: Strategy,
    },
    Tuple(Vec<ValueTree>),
    Optional(Option<Box<ValueTree>>),
    List {
        items: Vec<ValueTree>,
        min: usize,
    },
    /// Entries are kept sorted by key.
    Dict {
        entries: Vec<(ValueTree, ValueTree)>,
        min: usize,
    },
}

#[derive(Clone)]
pub struct ValueTree {
    current: Value,
    shape: Shape,
}

impl fmt::Debug for ValueTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValueTree")
            .field("current", &self.current)
            .field("complexity", &self.complexity())
            .finish()
    }
}

impl ValueTree {
    pub fn current(&self) -> &Value {
        &self.current
    }

    pub fn into_current(self) -> Value {
        self.current
    }

    pub(crate) fn leaf(v: Value) -> Self {
        ValueTree {
            current: v,
            shape: Shape::Leaf,
        }
    }

    pub(crate) fn int(lo: i128, v: i128) -> Self {
        ValueTree {
            current: Value::Int(v),
            shape: Shape::Int { lo },
        }
    }

    pub(crate) fn mapped(inner: ValueTree, f: &MapFn) -> Result<Self, StrategyError> {
        let current = f.apply(inner.current.clone())?;
        Ok(ValueTree {
            current,
            shape: Shape::Mapped {
                inner: Box::new(inner),
                f: f.clone(),
            },
        })
    }

    pub(crate) fn filtered(inner: ValueTree, pred: &FilterFn) -> Self {
        ValueTree {
            current: inner.current.clone(),
            shape: Shape::Filtered {
                inner: Box::new(inner),
                pred: pred.clone(),
            },
        }
    }

    pub(crate) fn choice(index: usize, inner: ValueTree, alternatives: &Strategy) -> Self {
        ValueTree {
            current: inner.current.clone(),
            shape: Shape::Choice {
                index,
                inner: Box::new(inner),
                alternatives: alternatives.clone(),
            },
        }
    }

    pub(crate) fn tuple(items: Vec<ValueTree>) -> Self {
        ValueTree {
            current: Value::Tuple(items.iter().map(|t| t.current.clone()).collect()),
            shape: Shape::Tuple(items),
        }
    }

    pub(crate) fn optional(inner: Option<ValueTree>) -> Self {
        ValueTree {
            current: Value::Option(inner.as_ref().map(|t| Box::new(t.current.clone()))),
            shape: Shape::Optional(inner.map(Box::new)),
        }
    }

    pub(crate) fn list(items: Vec<ValueTree>, min: usize) -> Self {
        ValueTree {
            current: Value::List(items.iter().map(|t| t.current.clone()).collect()),
            shape: Shape::List { items, min },
        }
    }

    pub(crate) fn dict(mut entries: Vec<(ValueTree, ValueTree)>, min: usize) -> Self {
        entries.sort_by(|a, b| a.0.current.cmp(&b.0.current));
        let map: BTreeMap<Value, Value> = entries
            .iter()
            .map(|(k, v)| (k.current.clone(), v.current.clone()))
            .collect();
        debug_assert_eq!(map.len(), entries.len(), "duplicate keys in dict tree");
        ValueTree {
            current: Value::Map(map),
            shape: Shape::Dict { entries, min },
        }
    }

    /// Distance from the simplest value of the originating strategy. Strictly
    /// decreases along every candidate edge.
    pub fn complexity(&self) -> u128 {
        match &self.shape {
            Shape::Leaf => 0,
            Shape::Int { lo } => match &self.current {
                Value::Int(v) => (*v - *lo) as u128,
                _ => unreachable!("int tree holds an int"),
            },
            Shape::Mapped { inner, .. } | Shape::Filtered { inner, .. } => inner.complexity(),
            Shape::Choice { index, inner, .. } => {
                (*index as u128).saturating_add(inner.complexity())
            }
            Shape::Tuple(items) => items
                .iter()
                .fold(0u128, |acc, t| acc.saturating_add(t.complexity())),
            Shape::Optional(None) => 0,
            Shape::Optional(Some(inner)) => inner.complexity().saturating_add(1),
            Shape::List { items, min } => {
                items.iter().fold((items.len() - min) as u128, |acc, t| {
                    acc.saturating_add(t.complexity())
                })
            }
            Shape::Dict { entries, min } => {
                entries
                    .iter()
                    .fold((entries.len() - min) as u128, |acc, (k, v)| {
                        acc.saturating_add(k.complexity())
                            .saturating_add(v.complexity())
                    })
            }
        }
    }

    /// Simpler trees, simplest first. Every candidate stays inside the
    /// originating strategy's domain.
    pub fn candidates(&self) -> Vec<ValueTree> {
        let mut out = Vec::new();
        match &self.shape {
            Shape::Leaf => {}
            Shape::Int { lo } => {
                let Value::Int(cur) = self.current else {
                    unreachable!("int tree holds an int")
                };
                let distance = (cur - lo) as u128;
                let mut shift = 0;
                while shift < 128 {
                    let delta = distance >> shift;
                    if delta == 0 {
                        break;
                    }
                    out.push(ValueTree::int(*lo, cur - delta as i128));
                    shift += 1;
                }
            }
            Shape::Mapped { inner, f } => {
                out.extend(
                    inner
                        .candidates()
                        .into_iter()
                        .filter_map(|c| ValueTree::mapped(c, f).ok()),
                );
            }
            Shape::Filtered { inner, pred } => {
                out.extend(
                    inner
                        .candidates()
                        .into_iter()
                        .filter(|c| pred.accepts(&c.current))
                        .map(|c| ValueTree::filtered(c, pred)),
                );
            }
            Shape::Choice {
                index,
                inner,
                alternatives,
            } => {
                let Node::OneOf(alts) = alternatives.node() else {
                    unreachable!("choice tree built from one_of")
                };
                let own = self.complexity();
                for (j, alt) in alts.iter().enumerate().take(*index) {
                    if let Some(t) = simplest_tree(alt) {
                        if (j as u128).saturating_add(t.complexity()) < own {
                            out.push(ValueTree::choice(j, t, alternatives));
                        }
                    }
                }
                out.extend(
                    inner
                        .candidates()
                        .into_iter()
                        .map(|c| ValueTree::choice(*index, c, alternatives)),
                );
            }
            Shape::Tuple(items) => {
                for (i, item) in items.iter().enumerate() {
                    for c in item.candidates() {
                        let mut next = items.clone();
                        next[i] = c;
                        out.push(ValueTree::tuple(next));
                    }
                }
            }
            Shape::Optional(None) => {}
            Shape::Optional(Some(inner)) => {
                out.push(ValueTree::optional(None));
                out.extend(
                    inner
                        .candidates()
                        .into_iter()
                        .map(|c| ValueTree::optional(Some(c))),
                );
            }
            Shape::List { items, min } => {
                if items.len() > *min {
                    for i in 0..items.len() {
                        let mut next = items.clone();
                        next.remove(i);
                        out.push(ValueTree::list(next, *min));
                    }
                }
                for (i, item) in items.iter().enumerate() {
                    for c in item.candidates() {
                        let mut next = items.clone();
                        next[i] = c;
                        out.push(ValueTree::list(next, *min));
                    }
                }
            }
            Shape::Dict { entries, min } => {
                if entries.len() > *min {
                    for i in 0..entries.len() {
                        let mut next = entries.clone();
                        next.remove(i);
                        out.push(ValueTree::dict(next, *min));
                    }
                }
                for (i, (k, _)) in entries.iter().enumerate() {
                    for c in k.candidates() {
                        if entries.iter().any(|(other, _)| other.current == c.current) {
                            continue;
                        }
                        let mut next = entries.clone();
                        next[i].0 = c;
                        out.push(ValueTree::dict(next, *min));
                    }
                }
                for (i, (_, v)) in entries.iter().enumerate() {
                    for c in v.candidates() {
                        let mut next = entries.clone();
                        next[i].1 = c;
                        out.push(ValueTree::dict(next, *min));
                    }
                }
            }
        }
        out
    }
}

/// How many base values a filter may skip while searching for its simplest
/// accepted value.
const SIMPLEST_SCAN: usize = REJECTIONS_PER_VALUE as usize;

/// The simplest value of a strategy, if one can be found cheaply. Filters
/// scan at most a bounded prefix of their base enumeration.
pub fn simplest_tree(s: &Strategy) -> Option<ValueTree> {
    match s.node() {
        Node::Just(v) => Some(ValueTree::leaf(v.clone())),
        Node::IntRange(r) => Some(ValueTree::int(r.lo, r.lo)),
        Node::Map { inner, f } => ValueTree::mapped(simplest_tree(inner)?, f).ok(),
        Node::Pattern { inner, .. } => simplest_tree(inner),
        Node::Filter { inner, pred, .. } => enumerate::trees(inner)
            .take(SIMPLEST_SCAN)
            .filter_map(Result::ok)
            .find(|t| pred.accepts(&t.current))
            .map(|t| ValueTree::filtered(t, pred)),
        Node::OneOf(alts) => alts
            .iter()
            .enumerate()
            .find_map(|(i, alt)| simplest_tree(alt).map(|t| ValueTree::choice(i, t, s))),
        Node::TupleOf(items) => Some(ValueTree::tuple(
            items.iter().map(simplest_tree).collect::<Option<_>>()?,
        )),
        Node::OptionalOf(_) => Some(ValueTree::optional(None)),
        Node::ListOf { inner, min, .. } => {
            let items = if *min == 0 {
                Vec::new()
            } else {
                let elem = simplest_tree(inner)?;
                alloc::vec![elem; *min]
            };
            Some(ValueTree::list(items, *min))
        }
        Node::OrderedMapOf {
            keys, values, min, ..
        } => {
            let mut entries: Vec<(ValueTree, ValueTree)> = Vec::new();
            if *min > 0 {
                let value = simplest_tree(values)?;
                for k in enumerate::trees(keys).take(SIMPLEST_SCAN.max(*min * 4)) {
                    let Ok(k) = k else { continue };
                    if entries.iter().all(|(e, _)| e.current != k.current) {
                        entries.push((k, value.clone()));
                        if entries.len() == *min {
                            break;
                        }
                    }
                }
                if entries.len() < *min {
                    return None;
                }
            }
            Some(ValueTree::dict(entries, *min))
        }
    }
}

/// Draw a value tree. Deterministic in `(s, gen state)`.
pub fn generate(s: &Strategy, gen: &mut Gen) -> Result<ValueTree, StrategyError> {
    match s.node() {
        Node::Just(v) => Ok(ValueTree::leaf(v.clone())),
        Node::IntRange(r) => {
            let v = gen.rng.uniform_in(r.lo, r.hi);
            Ok(ValueTree::int(r.lo, v))
        }
        Node::Map { inner, f } => ValueTree::mapped(generate(inner, gen)?, f),
        Node::Pattern { inner, .. } => generate(inner, gen),
        Node::Filter { inner, label, pred } => {
            for _ in 0..REJECTIONS_PER_VALUE {
                let t = generate(inner, gen)?;
                if pred.accepts(&t.current) {
                    return Ok(ValueTree::filtered(t, pred));
                }
                gen.reject(label)?;
            }
            Err(StrategyError::RejectionExhausted {
                label: label.clone(),
            })
        }
        Node::OneOf(alts) => {
            let i = gen.rng.index(alts.len());
            Ok(ValueTree::choice(i, generate(&alts[i], gen)?, s))
        }
        Node::TupleOf(items) => Ok(ValueTree::tuple(
            items
                .iter()
                .map(|c| generate(c, gen))
                .collect::<Result<_, _>>()?,
        )),
        Node::OptionalOf(inner) => {
            if gen.rng.uniform_in(0, 1) == 0 {
                Ok(ValueTree::optional(None))
            } else {
                Ok(ValueTree::optional(Some(generate(inner, gen)?)))
            }
        }
        Node::ListOf { inner, min, max } => {
            let len = gen.rng.uniform_in(*min as i128, *max as i128) as usize;
            let items = (0..len)
                .map(|_| generate(inner, gen))
                .collect::<Result<_, _>>()?;
            Ok(ValueTree::list(items, *min))
        }
        Node::OrderedMapOf {
            keys,
            values,
            min,
            max,
        } => {
            let size = gen.rng.uniform_in(*min as i128, *max as i128) as usize;
            let mut entries: Vec<(ValueTree, ValueTree)> = Vec::with_capacity(size);
            let mut attempts = 0u64;
            while entries.len() < size && attempts < REJECTIONS_PER_VALUE * (size as u64) {
                attempts += 1;
                let k = generate(keys, gen)?;
                if entries.iter().any(|(e, _)| e.current == k.current) {
                    continue;
                }
                let v = generate(values, gen)?;
                entries.push((k, v));
            }
            if entries.len() < *min {
                return Err(StrategyError::RejectionExhausted {
                    label: String::from("ordered_map_of: distinct keys"),
                });
            }
            Ok(ValueTree::dict(entries, *min))
        }
    }
}

/// Random tree with only the per-value rejection limit.
pub fn random_tree(s: &Strategy, rng: &mut PrngState) -> Result<ValueTree, StrategyError> {
    let mut gen = Gen {
        rng: *rng,
        rejections: 0,
        rejection_limit: u64::MAX,
    };
    let out = generate(s, &mut gen);
    *rng = gen.rng;
    out
}
