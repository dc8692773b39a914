//! Expression IR for the symbolic carrier.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use core::fmt;
use core::panic::Location;

use num_bigint::BigInt;

/// Identifier of a free integer variable introduced by symbolic lifting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Where a division or remainder was written in harness source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SourceLoc {
    pub file: &'static str,
    pub line: u32,
    pub column: u32,
}

impl SourceLoc {
    pub const UNKNOWN: SourceLoc = SourceLoc {
        file: "<unknown>",
        line: 0,
        column: 0,
    };

    #[track_caller]
    pub fn caller() -> Self {
        let loc = Location::caller();
        SourceLoc {
            file: loc.file(),
            line: loc.line(),
            column: loc.column(),
        }
    }
}

impl fmt::Display for SourceLoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymExpr {
    Const(BigInt),
    Var(VarId),
    Add(Arc<SymExpr>, Arc<SymExpr>),
    Sub(Arc<SymExpr>, Arc<SymExpr>),
    Mul(Arc<SymExpr>, Arc<SymExpr>),
    Div(Arc<SymExpr>, Arc<SymExpr>, SourceLoc),
    Rem(Arc<SymExpr>, Arc<SymExpr>, SourceLoc),
    Neg(Arc<SymExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, a: &BigInt, b: &BigInt) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymBool {
    Const(bool),
    Cmp(CmpOp, Arc<SymExpr>, Arc<SymExpr>),
    And(Arc<SymBool>, Arc<SymBool>),
    Or(Arc<SymBool>, Arc<SymBool>),
    Not(Arc<SymBool>),
}

impl SymExpr {
    pub fn constant(v: impl Into<BigInt>) -> Self {
        SymExpr::Const(v.into())
    }

    pub fn var(id: u32) -> Self {
        SymExpr::Var(VarId(id))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: SymExpr, b: SymExpr) -> Self {
        SymExpr::Add(Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: SymExpr, b: SymExpr) -> Self {
        SymExpr::Sub(Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: SymExpr, b: SymExpr) -> Self {
        SymExpr::Mul(Arc::new(a), Arc::new(b))
    }

    pub fn div(a: SymExpr, b: SymExpr, loc: SourceLoc) -> Self {
        SymExpr::Div(Arc::new(a), Arc::new(b), loc)
    }

    pub fn rem(a: SymExpr, b: SymExpr, loc: SourceLoc) -> Self {
        SymExpr::Rem(Arc::new(a), Arc::new(b), loc)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: SymExpr) -> Self {
        SymExpr::Neg(Arc::new(a))
    }

    pub fn cmp(self, op: CmpOp, rhs: SymExpr) -> SymBool {
        SymBool::Cmp(op, Arc::new(self), Arc::new(rhs))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            SymExpr::Const(_) => {}
            SymExpr::Var(id) => {
                out.insert(*id);
            }
            SymExpr::Neg(a) => a.free_vars(out),
            SymExpr::Add(a, b)
            | SymExpr::Sub(a, b)
            | SymExpr::Mul(a, b)
            | SymExpr::Div(a, b, _)
            | SymExpr::Rem(a, b, _) => {
                a.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SymExpr::Const(_) | SymExpr::Var(_) => 1,
            SymExpr::Neg(a) => 1 + a.depth(),
            SymExpr::Add(a, b)
            | SymExpr::Sub(a, b)
            | SymExpr::Mul(a, b)
            | SymExpr::Div(a, b, _)
            | SymExpr::Rem(a, b, _) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl SymBool {
    pub fn and(a: SymBool, b: SymBool) -> Self {
        SymBool::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: SymBool, b: SymBool) -> Self {
        SymBool::Or(Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: SymBool) -> Self {
        SymBool::Not(Arc::new(a))
    }

    pub fn implies(hypothesis: SymBool, conclusion: SymBool) -> Self {
        SymBool::or(SymBool::not(hypothesis), conclusion)
    }

    pub fn free_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            SymBool::Const(_) => {}
            SymBool::Cmp(_, a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            SymBool::And(a, b) | SymBool::Or(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            SymBool::Not(a) => a.free_vars(out),
        }
    }
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymExpr::Const(c) => write!(f, "{c}"),
            SymExpr::Var(id) => write!(f, "{id}"),
            SymExpr::Add(a, b) => write!(f, "({a} + {b})"),
            SymExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            SymExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            SymExpr::Div(a, b, _) => write!(f, "({a} / {b})"),
            SymExpr::Rem(a, b, _) => write!(f, "({a} % {b})"),
            SymExpr::Neg(a) => write!(f, "-{a}"),
        }
    }
}

impl fmt::Display for SymBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymBool::Const(b) => write!(f, "{b}"),
            SymBool::Cmp(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            SymBool::And(a, b) => write!(f, "({a} && {b})"),
            SymBool::Or(a, b) => write!(f, "({a} || {b})"),
            SymBool::Not(a) => write!(f, "!{a}"),
        }
    }
}
