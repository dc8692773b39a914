//! Canonical-order enumeration of strategy domains.
//!
//! Order: integer ranges ascending, `one_of` in declaration order, tuples
//! row-major (first component slowest), optionals absent-first, lists by
//! length then lexicographically, ordered maps by size then by key
//! combination. Streams are lazy, so a consumer-imposed budget can cut
//! through domains of any size.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::iter;

use crate::strategy::{base_cardinality, Cardinality, Node, Strategy, StrategyError};
use crate::tree::ValueTree;
use crate::value::Value;

/// Key domains of ordered maps are materialised; larger ones are refused.
pub const MAX_MATERIALIZED_KEYS: u64 = 1 << 20;

pub(crate) type TreeIter = Box<dyn Iterator<Item = Result<ValueTree, StrategyError>> + Send>;

/// Lazy enumeration of value trees in canonical order.
pub fn trees(s: &Strategy) -> TreeIter {
    match s.node() {
        Node::Just(v) => Box::new(iter::once(Ok(ValueTree::leaf(v.clone())))),
        Node::IntRange(r) => {
            let lo = r.lo;
            Box::new((r.lo..=r.hi).map(move |v| Ok(ValueTree::int(lo, v))))
        }
        Node::Map { inner, f } => {
            let f = f.clone();
            Box::new(trees(inner).map(move |t| t.and_then(|t| ValueTree::mapped(t, &f))))
        }
        Node::Pattern { inner, .. } => trees(inner),
        Node::Filter { inner, pred, .. } => {
            let pred = pred.clone();
            Box::new(trees(inner).filter_map(move |t| match t {
                Ok(t) if pred.accepts(t.current()) => Some(Ok(ValueTree::filtered(t, &pred))),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            }))
        }
        Node::OneOf(alts) => {
            let whole = s.clone();
            let alts = alts.clone();
            Box::new(alts.into_iter().enumerate().flat_map(move |(i, alt)| {
                let whole = whole.clone();
                trees(&alt).map(move |t| t.map(|t| ValueTree::choice(i, t, &whole)))
            }))
        }
        Node::TupleOf(items) => {
            Box::new(Product::new(items.clone()).map(|r| r.map(ValueTree::tuple)))
        }
        Node::OptionalOf(inner) => Box::new(
            iter::once(Ok(ValueTree::optional(None)))
                .chain(trees(inner).map(|t| t.map(|t| ValueTree::optional(Some(t))))),
        ),
        Node::ListOf { inner, min, max } => {
            let (inner, min) = (inner.clone(), *min);
            Box::new((min..=*max).flat_map(move |len| {
                Product::new(alloc::vec![inner.clone(); len])
                    .map(move |r| r.map(|items| ValueTree::list(items, min)))
            }))
        }
        Node::OrderedMapOf {
            keys,
            values,
            min,
            max,
        } => dict_trees(keys, values, *min, *max),
    }
}

fn dict_trees(keys: &Strategy, values: &Strategy, min: usize, max: usize) -> TreeIter {
    match base_cardinality(keys) {
        Cardinality::Finite(n) if n <= MAX_MATERIALIZED_KEYS => {}
        _ => return Box::new(iter::once(Err(StrategyError::NotEnumerable))),
    }
    let mut domain: Vec<ValueTree> = Vec::new();
    for k in trees(keys) {
        match k {
            Ok(k) => {
                if domain.iter().all(|d| d.current() != k.current()) {
                    domain.push(k);
                }
            }
            Err(e) => return Box::new(iter::once(Err(e))),
        }
    }
    let values = values.clone();
    let upper = max.min(domain.len());
    Box::new((min..=upper).flat_map(move |size| {
        let domain = domain.clone();
        let values = values.clone();
        Combinations::new(domain.len(), size).flat_map(move |combo| {
            let chosen: Vec<ValueTree> = combo.iter().map(|&i| domain[i].clone()).collect();
            Product::new(alloc::vec![values.clone(); size]).map(move |r| {
                r.map(|vals| ValueTree::dict(chosen.iter().cloned().zip(vals).collect(), min))
            })
        })
    }))
}

/// Row-major product over re-creatable component streams.
struct Product {
    factories: Vec<Strategy>,
    iters: Vec<TreeIter>,
    current: Vec<ValueTree>,
    started: bool,
    done: bool,
}

impl Product {
    fn new(factories: Vec<Strategy>) -> Self {
        Product {
            factories,
            iters: Vec::new(),
            current: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn start(&mut self) -> Option<Result<(), StrategyError>> {
        for f in &self.factories {
            let mut it = trees(f);
            match it.next()? {
                Ok(t) => self.current.push(t),
                Err(e) => return Some(Err(e)),
            }
            self.iters.push(it);
        }
        Some(Ok(()))
    }

    /// Advance the odometer; `None` when the first component is exhausted.
    fn advance(&mut self) -> Option<Result<(), StrategyError>> {
        let mut pos = self.factories.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            match self.iters[pos].next() {
                Some(Ok(t)) => {
                    self.current[pos] = t;
                    break;
                }
                Some(Err(e)) => return Some(Err(e)),
                None => {
                    let mut fresh = trees(&self.factories[pos]);
                    match fresh.next() {
                        Some(Ok(t)) => self.current[pos] = t,
                        Some(Err(e)) => return Some(Err(e)),
                        None => return None,
                    }
                    self.iters[pos] = fresh;
                }
            }
        }
        Some(Ok(()))
    }
}

impl Iterator for Product {
    type Item = Result<Vec<ValueTree>, StrategyError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let step = if self.started {
            self.advance()
        } else {
            self.started = true;
            self.start()
        };
        match step {
            Some(Ok(())) => Some(Ok(self.current.clone())),
            Some(Err(e)) => {
                self.done = true;
                Some(Err(e))
            }
            None => {
                self.done = true;
                None
            }
        }
    }
}

/// k-combinations of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    first: bool,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            first: true,
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.first {
            self.first = false;
            return Some(self.idx.clone());
        }
        let k = self.idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(self.idx.clone());
            }
        }
        self.done = true;
        None
    }
}

/// Ordered stream of values.
pub struct Enumeration {
    inner: TreeIter,
    remaining: Option<u64>,
}

impl Iterator for Enumeration {
    type Item = Result<Value, StrategyError>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(rem) = &mut self.remaining {
            if *rem == 0 {
                return None;
            }
            *rem -= 1;
        }
        self.inner.next().map(|t| t.map(ValueTree::into_current))
    }
}

/// Enumerate `s` in canonical order, optionally truncated to `limit` items.
///
/// Without a limit, a domain whose base cardinality is too large is refused.
pub fn enumerate(s: &Strategy, limit: Option<u64>) -> Result<Enumeration, StrategyError> {
    if limit.is_none() && base_cardinality(s) == Cardinality::TooLarge {
        return Err(StrategyError::NotEnumerable);
    }
    Ok(Enumeration {
        inner: trees(s),
        remaining: limit,
    })
}
