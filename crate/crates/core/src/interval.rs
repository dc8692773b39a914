//! Interval arithmetic and three-valued evaluation over boxes.
//!
//! All bounds are unbounded integers, so no evaluation can wrap. The
//! evaluators here are sound over-approximations: every concrete valuation
//! inside a box evaluates to a point inside the computed interval, and a
//! `True`/`False` verdict holds at every point of the box.

use alloc::collections::BTreeMap;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::expr::{CmpOp, SourceLoc, SymBool, SymExpr, VarId};

/// Closed integer interval `[lo, hi]`; never empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
}

impl Interval {
    pub fn new(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Self {
        let (lo, hi) = (lo.into(), hi.into());
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: impl Into<BigInt>) -> Self {
        let v = v.into();
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi(&self) -> &BigInt {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigInt {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigInt::zero())
    }

    /// Floor midpoint; always inside the interval.
    pub fn midpoint(&self) -> BigInt {
        let sum = &self.lo + &self.hi;
        num_integer::Integer::div_floor(&sum, &BigInt::from(2))
    }

    /// `[lo, mid]` and `[mid + 1, hi]`. Only valid for non-point intervals.
    pub fn bisect(&self) -> (Interval, Interval) {
        debug_assert!(!self.is_point());
        let mid = self.midpoint();
        let upper = &mid + BigInt::one();
        (
            Interval {
                lo: self.lo.clone(),
                hi: mid,
            },
            Interval {
                lo: upper,
                hi: self.hi.clone(),
            },
        )
    }

    fn from_candidates(c: [BigInt; 4]) -> Self {
        let [a, b, c, d] = c;
        let lo = a.clone().min(b.clone()).min(c.clone()).min(d.clone());
        let hi = a.max(b).max(c).max(d);
        Interval { lo, hi }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        Interval::from_candidates([
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ])
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    /// Truncating division. Returns `None` when the divisor may be zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        // Truncated quotient is monotone in each argument on a single-signed
        // divisor, so the extremes sit at the corners.
        Some(Interval::from_candidates([
            &self.lo / &o.lo,
            &self.lo / &o.hi,
            &self.hi / &o.lo,
            &self.hi / &o.hi,
        ]))
    }

    /// Remainder with the sign of the dividend. `None` when the divisor may
    /// be zero.
    pub fn rem(&self, o: &Interval) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        let lo_abs = o.lo.abs();
        let hi_abs = o.hi.abs();
        let (min_abs, max_abs) = if lo_abs < hi_abs {
            (lo_abs, hi_abs)
        } else {
            (hi_abs, lo_abs)
        };
        if self.lo.abs() < min_abs && self.hi.abs() < min_abs {
            return Some(self.clone());
        }
        let bound = max_abs - BigInt::one();
        let lo = if self.lo.is_negative() {
            self.lo.clone().max(-&bound)
        } else {
            BigInt::zero()
        };
        let hi = if self.hi.is_positive() {
            self.hi.clone().min(bound)
        } else {
            BigInt::zero()
        };
        Some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Per-variable interval assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalBox {
    dims: BTreeMap<VarId, Interval>,
}

impl IntervalBox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: VarId, iv: Interval) -> Self {
        self.dims.insert(var, iv);
        self
    }

    pub fn insert(&mut self, var: VarId, iv: Interval) {
        self.dims.insert(var, iv);
    }

    pub fn get(&self, var: VarId) -> Option<&Interval> {
        self.dims.get(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &Interval)> {
        self.dims.iter()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Disjoint union of variable sets; `other` wins on collisions.
    pub fn merge(&mut self, other: &IntervalBox) {
        for (k, v) in &other.dims {
            self.dims.insert(*k, v.clone());
        }
    }

    pub fn is_point(&self) -> bool {
        self.dims.values().all(Interval::is_point)
    }

    /// Variable with the widest interval; ties go to the lowest id.
    pub fn widest(&self) -> Option<VarId> {
        let mut best: Option<(VarId, BigInt)> = None;
        for (id, iv) in &self.dims {
            let w = iv.width();
            if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
                best = Some((*id, w));
            }
        }
        best.map(|(id, _)| id)
    }

    /// Split the widest non-point dimension at its midpoint.
    pub fn split(&self) -> Option<(IntervalBox, IntervalBox)> {
        let var = self.widest()?;
        let iv = &self.dims[&var];
        if iv.is_point() {
            return None;
        }
        let (low, high) = iv.bisect();
        let mut a = self.clone();
        let mut b = self.clone();
        a.dims.insert(var, low);
        b.dims.insert(var, high);
        Some((a, b))
    }

    pub fn midpoint(&self) -> Valuation {
        Valuation {
            values: self.dims.iter().map(|(k, v)| (*k, v.midpoint())).collect(),
        }
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        self.dims
            .iter()
            .all(|(k, iv)| v.get(*k).is_some_and(|x| iv.contains(x)))
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.dims.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

/// Concrete assignment of integers to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    values: BTreeMap<VarId, BigInt>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: VarId, v: impl Into<BigInt>) -> Self {
        self.values.insert(var, v.into());
        self
    }

    pub fn insert(&mut self, var: VarId, v: impl Into<BigInt>) {
        self.values.insert(var, v.into());
    }

    pub fn get(&self, var: VarId) -> Option<&BigInt> {
        self.values.get(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &BigInt)> {
        self.values.iter()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} = {v}")?;
        }
        f.write_str("}")
    }
}

/// Kleene three-valued truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth3 {
    True,
    False,
    Maybe,
}

impl Truth3 {
    pub fn and(self, o: Truth3) -> Truth3 {
        match (self, o) {
            (Truth3::False, _) | (_, Truth3::False) => Truth3::False,
            (Truth3::True, Truth3::True) => Truth3::True,
            _ => Truth3::Maybe,
        }
    }

    pub fn or(self, o: Truth3) -> Truth3 {
        match (self, o) {
            (Truth3::True, _) | (_, Truth3::True) => Truth3::True,
            (Truth3::False, Truth3::False) => Truth3::False,
            _ => Truth3::Maybe,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Truth3 {
        match self {
            Truth3::True => Truth3::False,
            Truth3::False => Truth3::True,
            Truth3::Maybe => Truth3::Maybe,
        }
    }
}

impl From<bool> for Truth3 {
    fn from(b: bool) -> Self {
        if b {
            Truth3::True
        } else {
            Truth3::False
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("divisor interval may contain zero at {0}")]
    DivMaybeZero(SourceLoc),
    #[error("variable {0} is not bound by the box")]
    UnboundVariable(VarId),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero at {0}")]
    DivByZero(SourceLoc),
    #[error("variable {0} has no value")]
    UnboundVariable(VarId),
}

pub fn interval_eval(e: &SymExpr, b: &IntervalBox) -> Result<Interval, IntervalError> {
    Ok(match e {
        SymExpr::Const(c) => Interval::point(c.clone()),
        SymExpr::Var(id) => b
            .get(*id)
            .cloned()
            .ok_or(IntervalError::UnboundVariable(*id))?,
        SymExpr::Add(x, y) => interval_eval(x, b)?.add(&interval_eval(y, b)?),
        SymExpr::Sub(x, y) => interval_eval(x, b)?.sub(&interval_eval(y, b)?),
        SymExpr::Mul(x, y) => interval_eval(x, b)?.mul(&interval_eval(y, b)?),
        SymExpr::Neg(x) => interval_eval(x, b)?.neg(),
        SymExpr::Div(x, y, loc) => interval_eval(x, b)?
            .div(&interval_eval(y, b)?)
            .ok_or(IntervalError::DivMaybeZero(*loc))?,
        SymExpr::Rem(x, y, loc) => interval_eval(x, b)?
            .rem(&interval_eval(y, b)?)
            .ok_or(IntervalError::DivMaybeZero(*loc))?,
    })
}

fn compare(op: CmpOp, a: &Interval, b: &Interval) -> Truth3 {
    match op {
        CmpOp::Lt => {
            if a.hi < b.lo {
                Truth3::True
            } else if a.lo >= b.hi {
                Truth3::False
            } else {
                Truth3::Maybe
            }
        }
        CmpOp::Le => {
            if a.hi <= b.lo {
                Truth3::True
            } else if a.lo > b.hi {
                Truth3::False
            } else {
                Truth3::Maybe
            }
        }
        CmpOp::Gt => compare(CmpOp::Lt, b, a),
        CmpOp::Ge => compare(CmpOp::Le, b, a),
        CmpOp::Eq => {
            if a.is_point() && b.is_point() && a.lo == b.lo {
                Truth3::True
            } else if a.hi < b.lo || b.hi < a.lo {
                Truth3::False
            } else {
                Truth3::Maybe
            }
        }
        CmpOp::Ne => compare(CmpOp::Eq, a, b).not(),
    }
}

pub fn truth_eval(p: &SymBool, b: &IntervalBox) -> Result<Truth3, IntervalError> {
    Ok(match p {
        SymBool::Const(v) => Truth3::from(*v),
        SymBool::Cmp(op, x, y) => compare(*op, &interval_eval(x, b)?, &interval_eval(y, b)?),
        SymBool::And(x, y) => {
            let l = truth_eval(x, b)?;
            if l == Truth3::False {
                return Ok(Truth3::False);
            }
            l.and(truth_eval(y, b)?)
        }
        SymBool::Or(x, y) => {
            let l = truth_eval(x, b)?;
            if l == Truth3::True {
                return Ok(Truth3::True);
            }
            l.or(truth_eval(y, b)?)
        }
        SymBool::Not(x) => truth_eval(x, b)?.not(),
    })
}

/// Integer semantics: division truncates toward zero, remainder takes the
/// sign of the dividend.
pub fn concrete_eval(e: &SymExpr, v: &Valuation) -> Result<BigInt, EvalError> {
    Ok(match e {
        SymExpr::Const(c) => c.clone(),
        SymExpr::Var(id) => v.get(*id).cloned().ok_or(EvalError::UnboundVariable(*id))?,
        SymExpr::Add(x, y) => concrete_eval(x, v)? + concrete_eval(y, v)?,
        SymExpr::Sub(x, y) => concrete_eval(x, v)? - concrete_eval(y, v)?,
        SymExpr::Mul(x, y) => concrete_eval(x, v)? * concrete_eval(y, v)?,
        SymExpr::Neg(x) => -concrete_eval(x, v)?,
        SymExpr::Div(x, y, loc) => {
            let (n, d) = (concrete_eval(x, v)?, concrete_eval(y, v)?);
            if d.is_zero() {
                return Err(EvalError::DivByZero(*loc));
            }
            n / d
        }
        SymExpr::Rem(x, y, loc) => {
            let (n, d) = (concrete_eval(x, v)?, concrete_eval(y, v)?);
            if d.is_zero() {
                return Err(EvalError::DivByZero(*loc));
            }
            n % d
        }
    })
}

pub fn concrete_truth(p: &SymBool, v: &Valuation) -> Result<bool, EvalError> {
    Ok(match p {
        SymBool::Const(b) => *b,
        SymBool::Cmp(op, x, y) => op.holds(&concrete_eval(x, v)?, &concrete_eval(y, v)?),
        SymBool::And(x, y) => concrete_truth(x, v)? && concrete_truth(y, v)?,
        SymBool::Or(x, y) => concrete_truth(x, v)? || concrete_truth(y, v)?,
        SymBool::Not(x) => !concrete_truth(x, v)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> SymExpr {
        SymExpr::var(i)
    }

    #[test]
    fn mul_of_paper_domain() {
        let b = IntervalBox::new()
            .with(VarId(0), Interval::new(1, 1000))
            .with(VarId(1), Interval::new(1, 1000));
        let iv = interval_eval(&SymExpr::mul(v(0), v(1)), &b).unwrap();
        assert_eq!(iv, Interval::new(1, 1_000_000));
    }

    #[test]
    fn sub_endpoints() {
        let b = IntervalBox::new()
            .with(VarId(0), Interval::new(0, 2))
            .with(VarId(1), Interval::new(1, 3));
        let iv = interval_eval(&SymExpr::sub(v(0), v(1)), &b).unwrap();
        assert_eq!(iv, Interval::new(-3, 1));
    }

    #[test]
    fn comparisons() {
        let b = IntervalBox::new()
            .with(VarId(0), Interval::new(0, 1))
            .with(VarId(1), Interval::new(2, 3));
        assert_eq!(truth_eval(&v(0).cmp(CmpOp::Lt, v(1)), &b), Ok(Truth3::True));
        let b = IntervalBox::new()
            .with(VarId(0), Interval::new(0, 5))
            .with(VarId(1), Interval::new(3, 4));
        assert_eq!(
            truth_eval(&v(0).cmp(CmpOp::Lt, v(1)), &b),
            Ok(Truth3::Maybe)
        );
        assert_eq!(
            truth_eval(&v(1).cmp(CmpOp::Ge, v(1)), &b),
            Ok(Truth3::Maybe)
        );
    }

    #[test]
    fn kleene_tables() {
        use Truth3::*;
        assert_eq!(True.and(Maybe), Maybe);
        assert_eq!(False.and(Maybe), False);
        assert_eq!(True.or(Maybe), True);
        assert_eq!(False.or(Maybe), Maybe);
        assert_eq!(Maybe.not(), Maybe);
    }

    #[test]
    fn truncating_division() {
        let val = Valuation::new();
        let loc = SourceLoc::UNKNOWN;
        let div = SymExpr::div(SymExpr::constant(-7), SymExpr::constant(2), loc);
        let rem = SymExpr::rem(SymExpr::constant(-7), SymExpr::constant(2), loc);
        assert_eq!(concrete_eval(&div, &val), Ok(BigInt::from(-3)));
        assert_eq!(concrete_eval(&rem, &val), Ok(BigInt::from(-1)));
        let by_zero = SymExpr::div(v(0), SymExpr::constant(0), loc);
        assert_eq!(
            concrete_eval(&by_zero, &Valuation::new().with(VarId(0), 4)),
            Err(EvalError::DivByZero(loc))
        );
    }

    #[test]
    fn zero_straddling_divisor() {
        let b = IntervalBox::new().with(VarId(0), Interval::new(-1, 1));
        let e = SymExpr::div(SymExpr::constant(10), v(0), SourceLoc::UNKNOWN);
        assert!(matches!(
            interval_eval(&e, &b),
            Err(IntervalError::DivMaybeZero(_))
        ));
    }

    #[test]
    fn split_is_refinement() {
        let b = IntervalBox::new()
            .with(VarId(0), Interval::new(0, 10))
            .with(VarId(1), Interval::new(0, 3));
        let (l, h) = b.split().unwrap();
        assert_eq!(l.get(VarId(0)), Some(&Interval::new(0, 5)));
        assert_eq!(h.get(VarId(0)), Some(&Interval::new(6, 10)));
        assert_eq!(l.get(VarId(1)), b.get(VarId(1)));
        assert!(IntervalBox::new()
            .with(VarId(0), Interval::point(3))
            .split()
            .is_none());
    }

    fn brute_range(op: fn(i64, i64) -> Option<i64>, a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for x in a.0..=a.1 {
            for y in b.0..=b.1 {
                if let Some(r) = op(x, y) {
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
            }
        }
        (lo, hi)
    }

    proptest::proptest! {
        #[test]
        fn div_rem_contain_brute_force(
            al in -30i64..30, aw in 0i64..20,
            bl in -30i64..30, bw in 0i64..20,
        ) {
            let a = Interval::new(al, al + aw);
            let b = Interval::new(bl, bl + bw);
            if let Some(q) = a.div(&b) {
                let (lo, hi) = brute_range(|x, y| Some(x / y), (al, al + aw), (bl, bl + bw));
                proptest::prop_assert!(q.contains(&lo.into()) && q.contains(&hi.into()));
                // Corner evaluation is exact for division.
                proptest::prop_assert_eq!(q, Interval::new(lo, hi));
            }
            if let Some(r) = a.rem(&b) {
                let (lo, hi) = brute_range(|x, y| Some(x % y), (al, al + aw), (bl, bl + bw));
                proptest::prop_assert!(r.contains(&lo.into()) && r.contains(&hi.into()));
            }
        }
    }
}
