//! Lifting strategies onto the symbolic carrier.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::carrier::{Bool, Fault, Int, Term};
use crate::expr::{SymBool, SymExpr, VarId};
use crate::interval::{Interval, IntervalBox, Valuation};
use crate::strategy::{FilterFn, MapFn, Node, Strategy};
use crate::value::Value;

/// Upper bound on the number of boxes a nest of `one_of`s may expand into.
pub const MAX_CASES: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unsupported(pub String);

impl fmt::Display for Unsupported {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Hands out fresh variable ids.
#[derive(Clone, Debug, Default)]
pub struct SymContext {
    next: u32,
}

impl SymContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> VarId {
        let id = VarId(self.next);
        self.next += 1;
        id
    }
}

/// Recipe for rebuilding the concrete input a valuation stands for.
#[derive(Clone)]
pub enum Template {
    Const(Value),
    Var(VarId),
    Mapped(Box<Template>, MapFn),
    Filtered(Box<Template>, FilterFn),
    Tuple(Vec<Template>),
}

impl fmt::Debug for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Template::Const(v) => write!(f, "Const({v})"),
            Template::Var(id) => write!(f, "Var({id})"),
            Template::Mapped(t, _) => write!(f, "Mapped({t:?})"),
            Template::Filtered(t, _) => write!(f, "Filtered({t:?})"),
            Template::Tuple(items) => f.debug_tuple("Tuple").field(items).finish(),
        }
    }
}

impl Template {
    /// The concrete input at `v`, or None if a variable is unbound, the
    /// value does not fit, a transform fails or a filter rejects.
    pub fn instantiate(&self, v: &Valuation) -> Option<Value> {
        Some(match self {
            Template::Const(c) => c.clone(),
            Template::Var(id) => Value::Int(i128::try_from(v.get(*id)?).ok()?),
            Template::Mapped(inner, f) => f.apply(inner.instantiate(v)?).ok()?,
            Template::Filtered(inner, pred) => {
                let x = inner.instantiate(v)?;
                if !pred.accepts(&x) {
                    return None;
                }
                x
            }
            Template::Tuple(items) => Value::Tuple(
                items
                    .iter()
                    .map(|t| t.instantiate(v))
                    .collect::<Option<_>>()?,
            ),
        })
    }
}

/// One box of the input domain: the symbolic input, its variable ranges and
/// the filter conditions the input is known to satisfy.
#[derive(Clone, Debug)]
pub struct SymbolicCase {
    pub term: Term,
    pub region: IntervalBox,
    pub hypotheses: Vec<SymBool>,
    pub template: Template,
}

impl SymbolicCase {
    /// Conjunction of the hypotheses.
    pub fn hypothesis(&self) -> SymBool {
        self.hypotheses
            .iter()
            .cloned()
            .reduce(SymBool::and)
            .unwrap_or(SymBool::Const(true))
    }
}

/// First fault inside a term, if any.
pub fn term_fault(t: &Term) -> Option<&Fault> {
    match t {
        Term::Int(Int::Fault(f)) | Term::Bool(Bool::Fault(f)) => Some(f),
        Term::Tuple(items) => items.iter().find_map(term_fault),
        _ => None,
    }
}

/// Lift `s` to symbolic cases, one per `one_of` branch combination.
pub fn symbolize(s: &Strategy, ctx: &mut SymContext) -> Result<Vec<SymbolicCase>, Unsupported> {
    Ok(match s.node() {
        Node::Just(v) => vec![SymbolicCase {
            term: Term::from_value(v),
            region: IntervalBox::new(),
            hypotheses: Vec::new(),
            template: Template::Const(v.clone()),
        }],
        Node::IntRange(r) => {
            let id = ctx.fresh();
            vec![SymbolicCase {
                term: Term::Int(Int::Sym(SymExpr::Var(id))),
                region: IntervalBox::new().with(id, Interval::new(r.lo, r.hi)),
                hypotheses: Vec::new(),
                template: Template::Var(id),
            }]
        }
        Node::Map { inner, f } => {
            let g = match f {
                MapFn::Carrier(g) => g,
                MapFn::Opaque(_) => return Err(Unsupported("opaque map transform".into())),
            };
            let mut out = symbolize(inner, ctx)?;
            for case in &mut out {
                let term = g(&case.term);
                if let Some(fault) = term_fault(&term) {
                    return Err(Unsupported(format!("map transform: {fault}")));
                }
                case.term = term;
                case.template = Template::Mapped(Box::new(case.template.clone()), f.clone());
            }
            out
        }
        Node::Filter { inner, label, pred } => {
            let g = match pred {
                FilterFn::Carrier(g) => g,
                FilterFn::Opaque(_) => {
                    return Err(Unsupported(format!("opaque filter `{label}`")));
                }
            };
            let mut out = symbolize(inner, ctx)?;
            for case in &mut out {
                match g(&case.term) {
                    Bool::Lit(true) => {}
                    Bool::Lit(false) => case.hypotheses.push(SymBool::Const(false)),
                    Bool::Sym(h) => case.hypotheses.push(h),
                    Bool::Fault(fault) => {
                        return Err(Unsupported(format!("filter `{label}`: {fault}")));
                    }
                }
                case.template = Template::Filtered(Box::new(case.template.clone()), pred.clone());
            }
            out
        }
        Node::OneOf(alts) => {
            let mut out = Vec::new();
            for alt in alts {
                out.extend(symbolize(alt, ctx)?);
                if out.len() > MAX_CASES {
                    return Err(Unsupported(format!(
                        "more than {MAX_CASES} one_of branches"
                    )));
                }
            }
            out
        }
        Node::TupleOf(items) => {
            let mut acc = vec![SymbolicCase {
                term: Term::Tuple(Vec::new()),
                region: IntervalBox::new(),
                hypotheses: Vec::new(),
                template: Template::Tuple(Vec::new()),
            }];
            for item in items {
                let parts = symbolize(item, ctx)?;
                if acc.len().saturating_mul(parts.len()) > MAX_CASES {
                    return Err(Unsupported(format!(
                        "more than {MAX_CASES} one_of branches"
                    )));
                }
                let mut next = Vec::with_capacity(acc.len() * parts.len());
                for prefix in &acc {
                    for part in &parts {
                        next.push(extend(prefix, part));
                    }
                }
                acc = next;
            }
            acc
        }
        Node::OptionalOf(_) => return Err(Unsupported("optional_of strategy".into())),
        Node::ListOf { .. } => return Err(Unsupported("list_of strategy".into())),
        Node::OrderedMapOf { .. } => return Err(Unsupported("ordered_map_of strategy".into())),
        Node::Pattern { .. } => return Err(Unsupported("string pattern strategy".into())),
    })
}

fn extend(prefix: &SymbolicCase, part: &SymbolicCase) -> SymbolicCase {
    let mut c = prefix.clone();
    if let Term::Tuple(items) = &mut c.term {
        items.push(part.term.clone());
    }
    if let Template::Tuple(items) = &mut c.template {
        items.push(part.template.clone());
    }
    c.region.merge(&part.region);
    c.hypotheses.extend(part.hypotheses.iter().cloned());
    c
}
