//! The dual carrier harness predicates are written against.
//!
//! A predicate receives a [`Term`] and returns a [`Bool`]. The same code runs
//! in two modes: with literal integers (fuzzing, enumeration, replay) every
//! operation computes eagerly; with symbolic integers the operations build an
//! expression tree that the interval solver later decides. Host control flow
//! cannot branch on a symbolic [`Bool`]; [`Bool::decide`] traps instead, which
//! the symbolic backend reports as unsupported.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, BitAnd, BitOr, Div, Mul, Neg, Not, Rem, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::expr::{CmpOp, SourceLoc, SymBool, SymExpr};
use crate::value::Value;

/// Why a predicate (or a carrier transform) did not produce a clean answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Assertion-failure analog: the predicate aborted.
    Failed(String),
    DivByZero(SourceLoc),
    /// The predicate did something the symbolic carrier cannot express.
    Unsupported(String),
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::Failed(msg) => write!(f, "{msg}"),
            Fault::DivByZero(loc) => write!(f, "division by zero at {loc}"),
            Fault::Unsupported(msg) => write!(f, "unsupported on the symbolic carrier: {msg}"),
        }
    }
}

/// Integer on the carrier: a literal, a symbolic expression, or a poisoned
/// result that propagates like NaN.
#[derive(Clone, Debug)]
pub enum Int {
    Lit(BigInt),
    Sym(SymExpr),
    Fault(Fault),
}

#[derive(Clone, Debug)]
pub enum Bool {
    Lit(bool),
    Sym(SymBool),
    Fault(Fault),
}

/// Carrier-level view of a strategy value.
#[derive(Clone, Debug)]
pub enum Term {
    Int(Int),
    Bool(Bool),
    Tuple(Vec<Term>),
    /// Non-arithmetic values (strings, containers) are only ever concrete.
    Other(Value),
}

impl Int {
    pub fn lit(v: impl Into<BigInt>) -> Self {
        Int::Lit(v.into())
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Int::Sym(_))
    }

    fn to_expr(&self) -> Option<SymExpr> {
        match self {
            Int::Lit(v) => Some(SymExpr::Const(v.clone())),
            Int::Sym(e) => Some(e.clone()),
            Int::Fault(_) => None,
        }
    }

    fn binary(
        &self,
        rhs: &Int,
        lit: impl FnOnce(&BigInt, &BigInt) -> Result<BigInt, Fault>,
        sym: impl FnOnce(SymExpr, SymExpr) -> SymExpr,
    ) -> Int {
        match (self, rhs) {
            (Int::Fault(f), _) | (_, Int::Fault(f)) => Int::Fault(f.clone()),
            (Int::Lit(a), Int::Lit(b)) => lit(a, b).map_or_else(Int::Fault, Int::Lit),
            (a, b) => match (a.to_expr(), b.to_expr()) {
                (Some(x), Some(y)) => Int::Sym(sym(x, y)),
                _ => unreachable!("faults handled above"),
            },
        }
    }

    fn compare(&self, op: CmpOp, rhs: &Int) -> Bool {
        match (self, rhs) {
            (Int::Fault(f), _) | (_, Int::Fault(f)) => Bool::Fault(f.clone()),
            (Int::Lit(a), Int::Lit(b)) => Bool::Lit(op.holds(a, b)),
            (a, b) => match (a.to_expr(), b.to_expr()) {
                (Some(x), Some(y)) => Bool::Sym(x.cmp(op, y)),
                _ => unreachable!("faults handled above"),
            },
        }
    }

    pub fn lt(&self, rhs: impl Into<Int>) -> Bool {
        self.compare(CmpOp::Lt, &rhs.into())
    }

    pub fn le(&self, rhs: impl Into<Int>) -> Bool {
        self.compare(CmpOp::Le, &rhs.into())
    }

    pub fn gt(&self, rhs: impl Into<Int>) -> Bool {
        self.compare(CmpOp::Gt, &rhs.into())
    }

    pub fn ge(&self, rhs: impl Into<Int>) -> Bool {
        self.compare(CmpOp::Ge, &rhs.into())
    }

    pub fn equals(&self, rhs: impl Into<Int>) -> Bool {
        self.compare(CmpOp::Eq, &rhs.into())
    }

    pub fn not_equals(&self, rhs: impl Into<Int>) -> Bool {
        self.compare(CmpOp::Ne, &rhs.into())
    }

    /// Literal value, or a trap when the integer is symbolic.
    pub fn concrete(&self) -> Result<&BigInt, Fault> {
        match self {
            Int::Lit(v) => Ok(v),
            Int::Sym(e) => Err(Fault::Unsupported(format!(
                "symbolic integer {e} used as a host value"
            ))),
            Int::Fault(f) => Err(f.clone()),
        }
    }

    /// Literal value as `i128`; traps when symbolic.
    pub fn to_i128(&self) -> Result<i128, Fault> {
        let v = self.concrete()?;
        v.to_i128()
            .ok_or_else(|| Fault::Failed(format!("integer {v} does not fit in 128 bits")))
    }
}

impl Bool {
    pub fn lit(v: bool) -> Self {
        Bool::Lit(v)
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Bool::Sym(_))
    }

    fn to_sym(&self) -> Option<SymBool> {
        match self {
            Bool::Lit(b) => Some(SymBool::Const(*b)),
            Bool::Sym(s) => Some(s.clone()),
            Bool::Fault(_) => None,
        }
    }

    /// Collapse to a host boolean for native control flow.
    ///
    /// Symbolic booleans trap: branching on them would silently explore only
    /// one path.
    pub fn decide(&self) -> Result<bool, Fault> {
        match self {
            Bool::Lit(b) => Ok(*b),
            Bool::Sym(s) => Err(Fault::Unsupported(format!(
                "branch on symbolic condition {s}"
            ))),
            Bool::Fault(f) => Err(f.clone()),
        }
    }

    pub fn and(&self, rhs: &Bool) -> Bool {
        match (self, rhs) {
            (Bool::Fault(f), _) | (_, Bool::Fault(f)) => Bool::Fault(f.clone()),
            (Bool::Lit(a), Bool::Lit(b)) => Bool::Lit(*a && *b),
            (Bool::Lit(false), _) | (_, Bool::Lit(false)) => Bool::Lit(false),
            (Bool::Lit(true), x) | (x, Bool::Lit(true)) => x.clone(),
            (a, b) => Bool::Sym(SymBool::and(a.to_sym().unwrap(), b.to_sym().unwrap())),
        }
    }

    pub fn or(&self, rhs: &Bool) -> Bool {
        match (self, rhs) {
            (Bool::Fault(f), _) | (_, Bool::Fault(f)) => Bool::Fault(f.clone()),
            (Bool::Lit(a), Bool::Lit(b)) => Bool::Lit(*a || *b),
            (Bool::Lit(true), _) | (_, Bool::Lit(true)) => Bool::Lit(true),
            (Bool::Lit(false), x) | (x, Bool::Lit(false)) => x.clone(),
            (a, b) => Bool::Sym(SymBool::or(a.to_sym().unwrap(), b.to_sym().unwrap())),
        }
    }

    pub fn negate(&self) -> Bool {
        match self {
            Bool::Lit(b) => Bool::Lit(!b),
            Bool::Sym(s) => Bool::Sym(SymBool::not(s.clone())),
            Bool::Fault(f) => Bool::Fault(f.clone()),
        }
    }

    pub fn implies(&self, rhs: &Bool) -> Bool {
        self.negate().or(rhs)
    }

    /// Branch-free conditional on integers.
    ///
    /// Literal conditions pick a side; symbolic ones are not expressible in
    /// the integer IR and trap.
    pub fn select(&self, then: &Int, otherwise: &Int) -> Int {
        match self.decide() {
            Ok(true) => then.clone(),
            Ok(false) => otherwise.clone(),
            Err(f) => Int::Fault(f),
        }
    }
}

impl Term {
    /// Lift a concrete value onto the carrier.
    pub fn from_value(v: &Value) -> Term {
        match v {
            Value::Int(i) => Term::Int(Int::Lit((*i).into())),
            Value::Bool(b) => Term::Bool(Bool::Lit(*b)),
            Value::Tuple(items) => Term::Tuple(items.iter().map(Term::from_value).collect()),
            other => Term::Other(other.clone()),
        }
    }

    /// Lower a fully literal term back to a value.
    pub fn to_value(&self) -> Result<Value, Fault> {
        Ok(match self {
            Term::Int(i) => Value::Int(i.to_i128()?),
            Term::Bool(b) => Value::Bool(b.decide()?),
            Term::Tuple(items) => {
                Value::Tuple(items.iter().map(Term::to_value).collect::<Result<_, _>>()?)
            }
            Term::Other(v) => v.clone(),
        })
    }

    pub fn int(&self) -> Result<Int, Fault> {
        match self {
            Term::Int(i) => Ok(i.clone()),
            other => Err(Fault::Failed(format!("expected an integer, found {other}"))),
        }
    }

    pub fn boolean(&self) -> Result<Bool, Fault> {
        match self {
            Term::Bool(b) => Ok(b.clone()),
            other => Err(Fault::Failed(format!("expected a boolean, found {other}"))),
        }
    }

    /// Tuple component `i`.
    pub fn get(&self, i: usize) -> Result<&Term, Fault> {
        match self {
            Term::Tuple(items) => items.get(i).ok_or_else(|| {
                Fault::Failed(format!(
                    "tuple of arity {} has no component {i}",
                    items.len()
                ))
            }),
            other => Err(Fault::Failed(format!("expected a tuple, found {other}"))),
        }
    }

    /// Shorthand for `get(i)?.int()`.
    pub fn int_at(&self, i: usize) -> Result<Int, Fault> {
        self.get(i)?.int()
    }

    /// Concrete value of a non-arithmetic term. Literal integers, booleans and
    /// tuples are lowered; anything symbolic traps.
    pub fn value(&self) -> Result<Value, Fault> {
        self.to_value()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(Int::Lit(v)) => write!(f, "{v}"),
            Term::Int(Int::Sym(e)) => write!(f, "{e}"),
            Term::Int(Int::Fault(x)) | Term::Bool(Bool::Fault(x)) => write!(f, "<{x}>"),
            Term::Bool(Bool::Lit(b)) => write!(f, "{b}"),
            Term::Bool(Bool::Sym(s)) => write!(f, "{s}"),
            Term::Tuple(items) => {
                f.write_str("(")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            Term::Other(v) => write!(f, "{v}"),
        }
    }
}

macro_rules! int_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Int {
            fn from(v: $t) -> Self {
                Int::Lit(v.into())
            }
        }
    )*};
}

int_from!(i8, i16, i32, i64, i128, u8, u16, u32, u64, BigInt);

impl From<&Int> for Int {
    fn from(v: &Int) -> Self {
        v.clone()
    }
}

impl From<bool> for Bool {
    fn from(v: bool) -> Self {
        Bool::Lit(v)
    }
}

fn checked_div(a: &BigInt, b: &BigInt, loc: SourceLoc) -> Result<BigInt, Fault> {
    if b.is_zero() {
        Err(Fault::DivByZero(loc))
    } else {
        Ok(a / b)
    }
}

fn checked_rem(a: &BigInt, b: &BigInt, loc: SourceLoc) -> Result<BigInt, Fault> {
    if b.is_zero() {
        Err(Fault::DivByZero(loc))
    } else {
        Ok(a % b)
    }
}

macro_rules! arith {
    ($trait:ident, $method:ident, $lit:expr, $sym:expr) => {
        impl<R: Into<Int>> $trait<R> for &Int {
            type Output = Int;
            fn $method(self, rhs: R) -> Int {
                self.binary(&rhs.into(), $lit, $sym)
            }
        }

        impl<R: Into<Int>> $trait<R> for Int {
            type Output = Int;
            fn $method(self, rhs: R) -> Int {
                self.binary(&rhs.into(), $lit, $sym)
            }
        }
    };
}

arith!(Add, add, |a, b| Ok(a + b), SymExpr::add);
arith!(Sub, sub, |a, b| Ok(a - b), SymExpr::sub);
arith!(Mul, mul, |a, b| Ok(a * b), SymExpr::mul);

macro_rules! division {
    ($trait:ident, $method:ident, $lit:ident, $sym:path) => {
        impl<R: Into<Int>> $trait<R> for &Int {
            type Output = Int;
            #[track_caller]
            fn $method(self, rhs: R) -> Int {
                let loc = SourceLoc::caller();
                self.binary(&rhs.into(), |a, b| $lit(a, b, loc), |a, b| $sym(a, b, loc))
            }
        }

        impl<R: Into<Int>> $trait<R> for Int {
            type Output = Int;
            #[track_caller]
            fn $method(self, rhs: R) -> Int {
                let loc = SourceLoc::caller();
                self.binary(&rhs.into(), |a, b| $lit(a, b, loc), |a, b| $sym(a, b, loc))
            }
        }
    };
}

division!(Div, div, checked_div, SymExpr::div);
division!(Rem, rem, checked_rem, SymExpr::rem);

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Int::Lit(v) => Int::Lit(-v),
            Int::Sym(e) => Int::Sym(SymExpr::neg(e.clone())),
            Int::Fault(f) => Int::Fault(f.clone()),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl BitAnd for Bool {
    type Output = Bool;
    fn bitand(self, rhs: Bool) -> Bool {
        self.and(&rhs)
    }
}

impl BitOr for Bool {
    type Output = Bool;
    fn bitor(self, rhs: Bool) -> Bool {
        self.or(&rhs)
    }
}

impl Not for Bool {
    type Output = Bool;
    fn not(self) -> Bool {
        self.negate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn literal_arithmetic() {
        let a = Int::lit(1000);
        let b = Int::lit(1000);
        let r = &a * &b;
        assert!(matches!(r.le(1_000_000), Bool::Lit(true)));
        assert!(matches!(Int::lit(-7) / 2, Int::Lit(ref v) if *v == BigInt::from(-3)));
        assert!(matches!(Int::lit(-7) % 2, Int::Lit(ref v) if *v == BigInt::from(-1)));
    }

    #[test]
    fn division_by_zero_poisons_and_records_location() {
        let line = line!() + 1;
        let r = Int::lit(4) / 0;
        let Int::Fault(Fault::DivByZero(loc)) = r.clone() else {
            panic!("expected fault, got {r:?}")
        };
        assert_eq!(loc.line, line);
        assert!(matches!(r.gt(0).decide(), Err(Fault::DivByZero(_))));
    }

    #[test]
    fn symbolic_builds_expressions() {
        let a = Int::Sym(SymExpr::var(0));
        let c = (&a * 2 + 1).lt(10);
        match c {
            Bool::Sym(s) => assert_eq!(alloc::format!("{s}"), "(((v0 * 2) + 1) < 10)"),
            other => panic!("expected symbolic, got {other:?}"),
        }
    }

    #[test]
    fn branching_on_symbolic_traps() {
        let a = Int::Sym(SymExpr::var(0));
        assert!(matches!(a.gt(5).decide(), Err(Fault::Unsupported(_))));
        assert!(matches!(a.concrete(), Err(Fault::Unsupported(_))));
    }

    #[test]
    fn literal_short_circuits_keep_symbolic_side() {
        let s = Int::Sym(SymExpr::var(0)).gt(1);
        assert!(matches!(Bool::Lit(false).and(&s), Bool::Lit(false)));
        assert!(matches!(Bool::Lit(true).or(&s), Bool::Lit(true)));
        assert!(Bool::Lit(true).and(&s).is_symbolic());
    }

    #[test]
    fn value_round_trip() {
        let v = Value::Tuple(vec![Value::Int(3), Value::Bool(true), Value::from("s")]);
        assert_eq!(Term::from_value(&v).to_value(), Ok(v));
    }
}
